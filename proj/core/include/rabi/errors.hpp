#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

// Error taxonomy shared by all modules. Everything derives from Error so
// callers (the CLI in particular) can map numeric failures to one exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A modulation tone whose closed-form phase integral divides by zero
// (eta = 0 with nonzero amplitude, or eta_g = 2*nu).
struct SingularModulation : Error {
    using Error::Error;
};

// Argument outside the supported range of a special function or formula.
struct DomainError : Error {
    using Error::Error;
};

// |Upsilon_k| >= 1: the Bessel-product expansion is outside its regime.
struct SeriesDivergence : Error {
    using Error::Error;
};

// A term fed into the frequency-shift formula is not "rapid" enough
// (|p_j| > 0.1 |f_j|) for the coarse-grained average to be meaningful.
struct CoarseGrainViolation : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

// Adaptive integrator could not meet the tolerance.
struct StepFailure : Error {
    using Error::Error;
};

// State norm drifted beyond the hard bound during integration.
struct NormDrift : Error {
    using Error::Error;
};

// An eigenvector overlaps two reference doublets almost equally; we flag
// instead of guessing a label.
struct PairingAmbiguity : Error {
    using Error::Error;
};

// Figure of merit requested for a vanishing matrix element.
struct ZeroCoupling : Error {
    using Error::Error;
};

// Reduced dressed-state model preconditions violated (|W_AA| not << eta).
struct ReductionInvalid : Error {
    using Error::Error;
};

struct UnknownPreset : Error {
    using Error::Error;
};

} // namespace rabi
