#pragma once
#include <stdexcept>
#include <string>

namespace rotorphonon {

// Error taxonomy, mirrored by the CLI exit codes:
//   validation_error -> 2, numerical_error (and children) -> 3, io_error -> 4.

// Malformed configuration or out-of-domain arguments.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not deliver a trustworthy result.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The crystal has a non-positive normal-mode eigenvalue in some direction.
struct instability_error : numerical_error {
  using numerical_error::numerical_error;
};

// Basis growth hit its size cap before eigenvalues settled.
struct nonconvergence_error : numerical_error {
  using numerical_error::numerical_error;
};

// Perturbative shift requested too close to a resonance.
struct resonance_error : numerical_error {
  using numerical_error::numerical_error;
};

// Root bracket does not contain a sign change.
struct bracket_error : numerical_error {
  using numerical_error::numerical_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rotorphonon
