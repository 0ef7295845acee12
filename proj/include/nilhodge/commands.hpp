#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilhodge/report.hpp"

namespace nh {

struct CommandOptions {
  std::string command;
  std::string target;  // catalog name or path to a JSON document
  std::uint64_t seed = 0;
  std::vector<double> hs;  // empty: command default
  std::vector<int> ps;     // empty: {1, n-1}
  double tol = 1e-9;
  // verify-lemma
  int n = 2;
  int trials = 100;
  // deform
  int direction = -1;  // tangent coordinate index; -1: first co-polarised direction
  double t_max = 0.2;
  int steps = 9;
  int order = 2;
  bool family = false;  // use the entry's parameter family instead of a Beltrami series
};

const std::vector<std::string>& command_names();

// Catalog entry by name, else a JSON document read from the path.
CatalogEntry resolve_entry(const std::string& target);

// Max residual of del^2, delbar^2, del delbar + delbar del, d^2, d_h^2 and
// d_h d_{-1/h} - (h + 1/h) del delbar over all degrees.
double operator_identity_residual(const InvariantModel& m, const std::vector<double>& hs);

// Input errors (exit code 2) versus mathematical failures (exit code 1).
bool is_input_error(ErrorKind k);

// Throws Error on input errors; mathematical failures become failed checks.
RunReport run_command(const CommandOptions& o);

}  // namespace nh
