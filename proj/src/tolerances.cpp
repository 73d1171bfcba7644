#include "radneumann/tolerances.hpp"

#include <cmath>

#include "radneumann/errors.hpp"

namespace radneumann {

void Tolerances::validate() const
{
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(abs_tol) || !ok(rel_tol) || !ok(zero_refine_tol) || !ok(simplicity_floor))
        throw Error(ErrorKind::Precondition, "tolerances must be finite and strictly positive");
}

}  // namespace radneumann
