#pragma once

#include <stdexcept>
#include <string>

namespace deflab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DEFLAB_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// linalg
DEFLAB_DEFINE_ERROR(RankDeficient);
DEFLAB_DEFINE_ERROR(NoConvergence);
DEFLAB_DEFINE_ERROR(Overflow);
DEFLAB_DEFINE_ERROR(DegenerateSpectrum);
DEFLAB_DEFINE_ERROR(ReconstructionFailure);
DEFLAB_DEFINE_ERROR(DomainError);

// algorithms
DEFLAB_DEFINE_ERROR(NearSingular);
DEFLAB_DEFINE_ERROR(IndexOutOfRange);
DEFLAB_DEFINE_ERROR(NoDeflation);

// stats
DEFLAB_DEFINE_ERROR(ZeroVariance);
DEFLAB_DEFINE_ERROR(SingularDesign);
DEFLAB_DEFINE_ERROR(InsufficientTail);

// harness
DEFLAB_DEFINE_ERROR(ConfigError);
DEFLAB_DEFINE_ERROR(IoError);
DEFLAB_DEFINE_ERROR(DataError);

#undef DEFLAB_DEFINE_ERROR

}  // namespace deflab
