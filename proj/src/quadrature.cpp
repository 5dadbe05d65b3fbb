#include "hetnet/quadrature.hpp"

#include <sstream>

namespace hetnet {

double require_converged(const QuadResult& r, const std::string& context) {
    if (!r.converged) {
        std::ostringstream msg;
        msg << context << ": quadrature did not converge (value " << r.value << ", error estimate "
            << r.error << " after " << r.intervals << " intervals)";
        throw NumericalError(msg.str(), r.value, r.error);
    }
    return r.value;
}

}  // namespace hetnet
