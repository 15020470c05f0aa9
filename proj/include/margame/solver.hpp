#pragma once

#include <cstddef>
#include <vector>

#include "margame/dynamics.hpp"

namespace margame {

/// Solution of a zero-sum matrix game with the row player (attacker)
/// maximizing.
struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> attacker;
  std::vector<double> defender;
};

MatrixGameSolution solve_matrix_game(const Matrix& payoff);

/// Attacker's guaranteed payoff of `attacker` (min over columns) and the
/// defender's guaranteed ceiling of `defender` (max over rows).
double guaranteed_floor(const Matrix& payoff, const std::vector<double>& attacker);
double guaranteed_ceiling(const Matrix& payoff, const std::vector<double>& defender);

struct ShapleyOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct ShapleyResult {
  std::vector<double> values;  // per state, terminal = 0
  std::vector<Matrix> q;       // per non-terminal state
  std::vector<MatrixGameSolution> solutions;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// V_{k+1}(s) = val[R(s) + discount * sum_s' T(s, a, d, s') V_k(s')] until the
/// sup-norm change drops below the tolerance. Throws Convergence otherwise.
ShapleyResult shapley_value_iteration(const MarkovGame& game, const TransitionModel& transitions,
                                      const ShapleyOptions& options = {});

enum class Player { Attacker, Defender };

Policy urs_policy(const MarkovGame& game, Player player);
Policy maxmin_policy(const ShapleyResult& result, Player player);

/// Pure attacker policy maximizing the defender-weighted Q row; ties go to
/// the earliest action.
Policy greedy_attacker_policy(const std::vector<Matrix>& q, const Policy& defender);

}  // namespace margame
