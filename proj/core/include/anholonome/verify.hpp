#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anholonome/zoo.hpp"

namespace anholonome {

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string error;  // set when the check itself raised
};

struct SystemReport {
  std::string system;
  std::vector<CheckResult> checks;

  bool pass() const;
  const CheckResult* find(const std::string& check) const;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  std::optional<double> tol;  // replaces every check's tolerance when set
};

/// Seed from ANHOLONOME_SEED, or 7 when unset or unparsable.
std::uint64_t default_seed();

/// Runs every suite that applies to the system: derivative engine, frame
/// identities, oracle and energy identities, and when declared the symmetry,
/// reduction and Routh suites. Samples depend only on the seed, the system
/// name and the check name.
SystemReport verify_system(const SystemSpec& spec, const VerifyOptions& options, const ParameterMap& parameters = {});

/// Runs the systems concurrently when `parallel`; result order follows input.
std::vector<SystemReport> verify_systems(const std::vector<const SystemSpec*>& specs, const VerifyOptions& options,
                                         bool parallel);

/// Table `check,samples,max_residual,tol,pass` with `# system=` lines
/// separating systems.
void write_report(std::ostream& out, const std::vector<SystemReport>& reports, const VerifyOptions& options);

}  // namespace anholonome
