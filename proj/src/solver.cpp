#include "margame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "margame/error.hpp"

namespace margame {

namespace {

constexpr double kPivotEps = 1e-12;

// Solves max sum(y) s.t. B y <= 1, y >= 0 for a strictly positive B with
// Bland's rule. Returns y and the dual x read off the slack reduced costs.
struct LpResult {
  std::vector<double> y;
  std::vector<double> x;
};

LpResult solve_positive_game_lp(const Matrix& b) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  const std::size_t width = n + m + 1;  // structural, slack, rhs
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = b(i, j);
    at(i, n + i) = 1.0;
    at(i, width - 1) = 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -1.0;

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  const std::size_t max_pivots = 1000 * (m + n);
  for (std::size_t pivots = 0;; ++pivots) {
    if (pivots > max_pivots) throw Error(ErrorKind::Convergence, "simplex failed to terminate");
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (at(m, c) < -kPivotEps) {
        enter = c;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (at(r, enter) <= kPivotEps) continue;
      const double ratio = at(r, width - 1) / at(r, enter);
      if (ratio < best_ratio - kPivotEps ||
          (std::abs(ratio - best_ratio) <= kPivotEps && leave < m && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    // B > 0 keeps the feasible region bounded.
    if (leave == m) throw Error(ErrorKind::Convergence, "unbounded game LP");

    const double pivot = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= pivot;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(leave, c);
    }
    basis[leave] = enter;
  }

  LpResult result{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) result.y[basis[r]] = std::max(0.0, at(r, width - 1));
  for (std::size_t i = 0; i < m; ++i) result.x[i] = std::max(0.0, at(m, n + i));
  return result;
}

std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const Matrix& payoff) {
  if (payoff.empty()) throw Error(ErrorKind::InvalidArgument, "empty payoff matrix");
  for (std::size_t i = 0; i < payoff.rows(); ++i)
    for (std::size_t j = 0; j < payoff.cols(); ++j)
      if (!std::isfinite(payoff(i, j)))
        throw Error(ErrorKind::InvalidArgument, "non-finite payoff entry");

  const std::size_t m = payoff.rows();
  const std::size_t n = payoff.cols();
  const double lo = payoff.min();
  const double hi = payoff.max();
  if (lo == hi) {
    return {lo, std::vector<double>(m, 1.0 / static_cast<double>(m)),
            std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }

  const double shift = 1.0 - lo;
  Matrix shifted(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) shifted(i, j) = payoff(i, j) + shift;

  const LpResult lp = solve_positive_game_lp(shifted);
  MatrixGameSolution s;
  s.attacker = normalized(lp.x);
  s.defender = normalized(lp.y);
  // Average the two certified bounds; they agree up to rounding.
  s.value = 0.5 * (guaranteed_floor(payoff, s.attacker) + guaranteed_ceiling(payoff, s.defender));
  s.value = std::clamp(s.value, lo, hi);
  return s;
}

double guaranteed_floor(const Matrix& payoff, const std::vector<double>& attacker) {
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < payoff.cols(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < payoff.rows(); ++i) v += attacker[i] * payoff(i, j);
    floor = std::min(floor, v);
  }
  return floor;
}

double guaranteed_ceiling(const Matrix& payoff, const std::vector<double>& defender) {
  double ceiling = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < payoff.rows(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < payoff.cols(); ++j) v += defender[j] * payoff(i, j);
    ceiling = std::max(ceiling, v);
  }
  return ceiling;
}

namespace {

Matrix continuation_game(const MarkovGame& game, const TransitionModel& transitions,
                         std::size_t q, const std::vector<double>& values) {
  const Matrix& reward = game.payoffs[q].attacker_reward;
  const Matrix& advance = transitions.states[q].advance;
  Matrix g(reward.rows(), reward.cols());
  for (std::size_t a = 0; a < reward.rows(); ++a)
    for (std::size_t d = 0; d < reward.cols(); ++d) {
      const double p = advance(a, d);
      g(a, d) = reward(a, d) + game.discount * ((1.0 - p) * values[q] + p * values[q + 1]);
    }
  return g;
}

}  // namespace

ShapleyResult shapley_value_iteration(const MarkovGame& game, const TransitionModel& transitions,
                                      const ShapleyOptions& options) {
  if (!(game.discount >= 0.0 && game.discount < 1.0))
    throw Error(ErrorKind::InvalidArgument, "discount out of range [0, 1)");
  if (!(options.tolerance > 0.0))
    throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  const std::size_t live = game.state_count() - 1;
  if (transitions.states.size() != live || game.payoffs.size() != live)
    throw Error(ErrorKind::InvalidArgument, "transition model does not match the game");

  ShapleyResult result;
  result.values.assign(game.state_count(), 0.0);
  std::vector<double> next(game.state_count(), 0.0);
  bool converged = false;
  for (std::size_t k = 1; k <= options.max_iterations; ++k) {
    double residual = 0.0;
    for (std::size_t q = 0; q < live; ++q) {
      next[q] = solve_matrix_game(continuation_game(game, transitions, q, result.values)).value;
      residual = std::max(residual, std::abs(next[q] - result.values[q]));
    }
    result.values.swap(next);
    result.iterations = k;
    result.residual = residual;
    result.residual_history.push_back(residual);
    if (residual < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(ErrorKind::Convergence,
                "value iteration did not converge within " +
                    std::to_string(options.max_iterations) +
                    " iterations, residual " + std::to_string(result.residual));

  for (std::size_t q = 0; q < live; ++q) {
    result.q.push_back(continuation_game(game, transitions, q, result.values));
    result.solutions.push_back(solve_matrix_game(result.q.back()));
  }
  return result;
}

Policy urs_policy(const MarkovGame& game, Player player) {
  Policy policy;
  for (const auto& s : game.states) {
    if (s.terminal) continue;
    const std::size_t k =
        player == Player::Attacker ? s.attacker_actions.size() : s.defender_actions.size();
    policy.push_back({s.index, std::vector<double>(k, 1.0 / static_cast<double>(k))});
  }
  return policy;
}

Policy maxmin_policy(const ShapleyResult& result, Player player) {
  Policy policy;
  for (std::size_t q = 0; q < result.solutions.size(); ++q) {
    const auto& s = result.solutions[q];
    policy.push_back({q, player == Player::Attacker ? s.attacker : s.defender});
  }
  return policy;
}

Policy greedy_attacker_policy(const std::vector<Matrix>& q, const Policy& defender) {
  if (q.size() != defender.size())
    throw Error(ErrorKind::InvalidArgument, "policy dimension mismatch");
  Policy policy;
  for (std::size_t s = 0; s < q.size(); ++s) {
    const Matrix& table = q[s];
    if (defender[s].probabilities.size() != table.cols())
      throw Error(ErrorKind::InvalidArgument,
                  "policy dimension mismatch at state " + std::to_string(s));
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < table.rows(); ++a) {
      double score = 0.0;
      for (std::size_t d = 0; d < table.cols(); ++d)
        score += defender[s].probabilities[d] * table(a, d);
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    std::vector<double> pure(table.rows(), 0.0);
    pure[best] = 1.0;
    policy.push_back({s, std::move(pure)});
  }
  return policy;
}

}  // namespace margame
