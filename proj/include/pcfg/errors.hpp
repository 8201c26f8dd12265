#ifndef PCFG_ERRORS_HPP
#define PCFG_ERRORS_HPP

#include <stdexcept>

namespace pcfg {

// A documented operation precondition does not hold (CLI exit code 3).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pcfg

#endif
