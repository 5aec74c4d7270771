#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <optional>
#include <string>

#include "chasm/advection.hpp"
#include "chasm/field.hpp"

namespace chasm {

enum class Scheme { LPC1, LAPC2, LAPC3, OS };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/// Theta_V applicator on flat field values: out = Theta_V[f].
using ThetaOp = std::function<void(const Eigen::ArrayXd& f, Eigen::ArrayXd& out)>;

/// Past Theta evaluations, newest first; stored un-shifted.
struct SchemeHistory {
  std::deque<Eigen::ArrayXd> theta_evals;
  std::optional<StateField> f_prev;
  std::size_t capacity = 2;

  std::size_t depth() const { return theta_evals.size(); }
  void push(Eigen::ArrayXd theta);
};

/// Number of stored Theta fields a scheme needs (stages - 1).
std::size_t history_depth(Scheme s);

struct StepCounters {
  std::size_t theta_evals = 0;
};

StateField lpc1_step(const StateField& f, Advector& advector, const ThetaOp& theta, double tau,
                     SchemeHistory* record = nullptr, StepCounters* counters = nullptr);
StateField lapc2_step(const StateField& f, SchemeHistory& history, Advector& advector,
                      const ThetaOp& theta, double tau, StepCounters* counters = nullptr);
StateField lapc3_step(const StateField& f, SchemeHistory& history, Advector& advector,
                      const ThetaOp& theta, double tau, StepCounters* counters = nullptr);
/// Half advection, explicit Theta step, half advection.
StateField strang_step(const StateField& f, Advector& advector, const ThetaOp& theta, double tau,
                       StepCounters* counters = nullptr);

/**
 * Starting values for the multistep schemes: runs 1 (LAPC2) or 2 (LAPC3)
 * LPC1 steps of size tau from `f`, which is advanced in place.
 */
SchemeHistory bootstrap(Scheme scheme, StateField& f, Advector& advector, const ThetaOp& theta,
                        double tau, StepCounters* counters = nullptr);

/// Steps a field with one scheme, bootstrapping multistep schemes on first use.
class Integrator {
 public:
  Integrator(Scheme scheme, Advector& advector, ThetaOp theta, double tau);
  void step(StateField& f);
  Scheme scheme() const { return scheme_; }
  const StepCounters& counters() const { return counters_; }
  const SchemeHistory& history() const { return history_; }

 private:
  Scheme scheme_;
  Advector& advector_;
  ThetaOp theta_;
  double tau_;
  SchemeHistory history_;
  StepCounters counters_;
};

}  // namespace chasm
