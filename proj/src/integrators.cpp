#include "chasm/integrators.hpp"

#include "chasm/errors.hpp"

namespace chasm {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::LPC1: return "lpc1";
    case Scheme::LAPC2: return "lapc2";
    case Scheme::LAPC3: return "lapc3";
    case Scheme::OS: return "os";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "lpc1") return Scheme::LPC1;
  if (name == "lapc2") return Scheme::LAPC2;
  if (name == "lapc3") return Scheme::LAPC3;
  if (name == "os") return Scheme::OS;
  throw ConfigError("unknown scheme '" + name + "' (expected lpc1, lapc2, lapc3 or os)");
}

void SchemeHistory::push(Eigen::ArrayXd theta) {
  theta_evals.push_front(std::move(theta));
  while (theta_evals.size() > capacity) theta_evals.pop_back();
}

std::size_t history_depth(Scheme s) {
  switch (s) {
    case Scheme::LAPC2: return 1;
    case Scheme::LAPC3: return 2;
    default: return 0;
  }
}

namespace {

Eigen::ArrayXd eval_theta(const ThetaOp& theta, const Eigen::ArrayXd& f, StepCounters* counters) {
  Eigen::ArrayXd out;
  if (theta) {
    theta(f, out);
    if (out.size() != f.size()) throw SizeError("Theta operator returned a field of wrong size");
  } else {
    out = Eigen::ArrayXd::Zero(f.size());
  }
  if (counters) ++counters->theta_evals;
  return out;
}

StateField with_values(const StateField& f, Eigen::ArrayXd values, double tau) {
  StateField out;
  out.shape = f.shape;
  out.patches = f.patches;
  out.values = std::move(values);
  out.time = f.time + tau;
  return out;
}

/// Shifts f and Theta[f] by tau in one sweep.
void shift_pair(Advector& adv, const Eigen::ArrayXd& f, const Eigen::ArrayXd& tf, double tau,
                Eigen::ArrayXd& u, Eigen::ArrayXd& v) {
  const Eigen::ArrayXd* in[] = {&f, &tf};
  Eigen::ArrayXd* out[] = {&u, &v};
  adv.shift(in, out, tau);
}

}  // namespace

StateField lpc1_step(const StateField& f, Advector& advector, const ThetaOp& theta, double tau,
                     SchemeHistory* record, StepCounters* counters) {
  Eigen::ArrayXd tf = eval_theta(theta, f.values, counters);
  Eigen::ArrayXd u, v;
  shift_pair(advector, f.values, tf, tau, u, v);
  const Eigen::ArrayXd predictor = u + tau * v;
  const Eigen::ArrayXd tp = eval_theta(theta, predictor, counters);
  Eigen::ArrayXd next = u + (0.5 * tau) * tp + (0.5 * tau) * v;
  if (record) {
    record->f_prev = f;
    record->push(std::move(tf));
  }
  return with_values(f, std::move(next), tau);
}

StateField lapc2_step(const StateField& f, SchemeHistory& history, Advector& advector,
                      const ThetaOp& theta, double tau, StepCounters* counters) {
  if (history.depth() < 1)
    throw BootstrapRequired("LAPC2 needs Theta[f^{n-1}]; bootstrap the history first");
  Eigen::ArrayXd tf = eval_theta(theta, f.values, counters);
  Eigen::ArrayXd u, v;
  shift_pair(advector, f.values, tf, tau, u, v);
  const Eigen::ArrayXd w1 = advector.shifted(history.theta_evals[0], 2 * tau);
  const Eigen::ArrayXd predictor = u + tau * (1.5 * v - 0.5 * w1);
  const Eigen::ArrayXd tp = eval_theta(theta, predictor, counters);
  Eigen::ArrayXd next = u + tau * ((5.0 / 12.0) * tp + (8.0 / 12.0) * v - (1.0 / 12.0) * w1);
  history.f_prev = f;
  history.push(std::move(tf));
  return with_values(f, std::move(next), tau);
}

StateField lapc3_step(const StateField& f, SchemeHistory& history, Advector& advector,
                      const ThetaOp& theta, double tau, StepCounters* counters) {
  if (history.depth() < 2)
    throw BootstrapRequired("LAPC3 needs Theta[f^{n-1}] and Theta[f^{n-2}]; bootstrap first");
  Eigen::ArrayXd tf = eval_theta(theta, f.values, counters);
  Eigen::ArrayXd u, v;
  shift_pair(advector, f.values, tf, tau, u, v);
  const Eigen::ArrayXd w1 = advector.shifted(history.theta_evals[0], 2 * tau);
  const Eigen::ArrayXd w2 = advector.shifted(history.theta_evals[1], 3 * tau);
  const Eigen::ArrayXd predictor =
      u + tau * ((23.0 / 12.0) * v - (16.0 / 12.0) * w1 + (5.0 / 12.0) * w2);
  const Eigen::ArrayXd tp = eval_theta(theta, predictor, counters);
  Eigen::ArrayXd next = u + tau * ((9.0 / 24.0) * tp + (19.0 / 24.0) * v - (5.0 / 24.0) * w1 +
                                   (1.0 / 24.0) * w2);
  history.f_prev = f;
  history.push(std::move(tf));
  return with_values(f, std::move(next), tau);
}

StateField strang_step(const StateField& f, Advector& advector, const ThetaOp& theta, double tau,
                       StepCounters* counters) {
  Eigen::ArrayXd g = advector.shifted(f.values, 0.5 * tau);
  g += tau * eval_theta(theta, g, counters);
  return with_values(f, advector.shifted(g, 0.5 * tau), tau);
}

SchemeHistory bootstrap(Scheme scheme, StateField& f, Advector& advector, const ThetaOp& theta,
                        double tau, StepCounters* counters) {
  SchemeHistory history;
  history.capacity = history_depth(scheme);
  for (std::size_t i = 0; i < history.capacity; ++i)
    f = lpc1_step(f, advector, theta, tau, &history, counters);
  return history;
}

Integrator::Integrator(Scheme scheme, Advector& advector, ThetaOp theta, double tau)
    : scheme_(scheme), advector_(advector), theta_(std::move(theta)), tau_(tau) {
  if (!(tau > 0)) throw ConfigError("time step must be positive");
  history_.capacity = history_depth(scheme);
}

void Integrator::step(StateField& f) {
  switch (scheme_) {
    case Scheme::LPC1:
      f = lpc1_step(f, advector_, theta_, tau_, nullptr, &counters_);
      return;
    case Scheme::OS:
      f = strang_step(f, advector_, theta_, tau_, &counters_);
      return;
    case Scheme::LAPC2:
    case Scheme::LAPC3:
      // bootstrap: LPC1 at the same tau until the history is full
      if (history_.depth() < history_.capacity) {
        f = lpc1_step(f, advector_, theta_, tau_, &history_, &counters_);
        return;
      }
      f = scheme_ == Scheme::LAPC2 ? lapc2_step(f, history_, advector_, theta_, tau_, &counters_)
                                   : lapc3_step(f, history_, advector_, theta_, tau_, &counters_);
      return;
  }
}

}  // namespace chasm
