#pragma once

namespace radneumann {

struct Tolerances {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    /// Bracket width (in r) at which zero refinement stops.
    double zero_refine_tol = 1e-12;
    /// Minimum |u'(tau)| / ||u||_inf for a zero of u to count as simple.
    double simplicity_floor = 1e-6;

    /// Throws Error(Precondition) unless every field is strictly positive and finite.
    void validate() const;

    static Tolerances with_tol(double t)
    {
        Tolerances tol;
        tol.abs_tol = t;
        tol.rel_tol = t;
        return tol;
    }
};

}  // namespace radneumann
