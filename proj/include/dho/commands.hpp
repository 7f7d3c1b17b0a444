// commands.hpp: the computations behind the dho subcommands, returning CSV tables
#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "dho/config.hpp"
#include "dho/csv.hpp"

namespace dho {

// Runs fn(0..n-1) on up to `threads` workers (0: hardware concurrency). Results are placed
// by index, so the outcome does not depend on scheduling. The exception of the lowest
// failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// One row: omega_bohr, gamma_plus, gamma_minus, S_plus, S_minus, Delta, Sigma, Sigma_prime,
// Delta_prime, reorganisation, S_zero, stable. "stable" refers to the physical model.
CsvTable cmd_coefficients(const RunConfig& cfg);

// t, then <variant>_xx, <variant>_pp, <variant>_xp per variant (covariance entries).
// Throws UnstableError for an unstable variant unless cfg.allow_unstable is set; the exact
// variant needs a stable model regardless.
CsvTable cmd_dynamics(const RunConfig& cfg);

// Labelled rows per variant: xx, pp, xp, fidelity (vs the exact steady state), stable.
// Unstable or unphysical master-equation steady states yield nan entries.
CsvTable cmd_steady(const RunConfig& cfg);

// Row-major over (T, lambda): T, lambda, fidelity_redfield_LS, fidelity_gkls,
// fidelity_shifted_noLS, stable. Failures at a grid point give nan and never abort the sweep.
CsvTable cmd_fidelity_map(const RunConfig& cfg);

} // namespace dho
