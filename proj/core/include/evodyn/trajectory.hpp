#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evodyn/simplex.hpp"

namespace evodyn {

/// Time-stamped states produced by an integrator. Times are strictly
/// increasing; each row may carry a named event ("" when absent).
class Trajectory {
 public:
  void append(double t, PopulationState x, std::string event = {});
  /// Attaches an event to the last row, joining with '|' if one is present.
  void tag_last(const std::string& event);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  std::size_t arity() const { return states_.empty() ? 0 : states_.front().size(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<PopulationState>& states() const { return states_; }
  const std::vector<std::string>& events() const { return events_; }

  double time(std::size_t k) const { return times_[k]; }
  const PopulationState& state(std::size_t k) const { return states_[k]; }
  const PopulationState& back() const { return states_.back(); }

  /// Component i along the whole trajectory.
  std::vector<double> series(std::size_t i) const;

 private:
  std::vector<double> times_;
  std::vector<PopulationState> states_;
  std::vector<std::string> events_;
};

/// CSV with header `t,x1,...,xN,event`; numbers in shortest round-trip form.
void write_csv(std::ostream& os, const Trajectory& traj);
std::string to_csv(const Trajectory& traj);
/// Inverse of write_csv; rows are re-validated as simplex states.
Trajectory read_csv(std::istream& is);

}  // namespace evodyn
