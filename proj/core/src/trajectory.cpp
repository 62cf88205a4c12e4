#include "evodyn/trajectory.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "evodyn/numeric.hpp"

namespace evodyn {

void Trajectory::append(double t, PopulationState x, std::string event) {
  if (!times_.empty()) {
    if (!(t > times_.back())) {
      throw std::invalid_argument("trajectory times must be strictly increasing: " + format_double(t) +
                                  " after " + format_double(times_.back()));
    }
    if (x.size() != arity()) throw std::invalid_argument("trajectory state arity changed");
  }
  times_.push_back(t);
  states_.push_back(std::move(x));
  events_.push_back(std::move(event));
}

void Trajectory::tag_last(const std::string& event) {
  if (events_.empty()) throw std::logic_error("tag_last on empty trajectory");
  auto& e = events_.back();
  e = e.empty() ? event : e + "|" + event;
}

std::vector<double> Trajectory::series(std::size_t i) const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s[i]);
  return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (std::size_t i = 0; i < traj.arity(); ++i) os << ",x" << (i + 1);
  os << ",event\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.time(k));
    for (double xi : traj.state(k).weights()) os << ',' << format_double(xi);
    os << ',' << traj.events()[k] << '\n';
  }
}

std::string to_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_csv(os, traj);
  return os.str();
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trajectory CSV");
  std::size_t columns = 1;
  for (char c : line) columns += (c == ',');
  if (columns < 4 || line.rfind("t,", 0) != 0) throw std::runtime_error("bad trajectory CSV header: " + line);
  const std::size_t n = columns - 2;
  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != columns) throw std::runtime_error("bad trajectory CSV row: " + line);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::stod(cells[i + 1]);
    traj.append(std::stod(cells[0]), validate_state(x), cells.back());
  }
  return traj;
}

}  // namespace evodyn
