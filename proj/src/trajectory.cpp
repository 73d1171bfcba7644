#include <algorithm>
#include <cmath>
#include <ostream>

#include "dop853.hpp"
#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/radial_ode.hpp"

namespace radneumann {

State Trajectory::eval(double r) const
{
    if (nodes_.empty())
        throw Error(ErrorKind::Precondition, "evaluating an empty trajectory");
    if (!(r >= 0.0 && r <= r_end()))
        throw Error(ErrorKind::Precondition, "r outside [0, r_end] in Trajectory::eval");

    if (r <= r_series_) {
        if (r == r_series_ && nodes_.size() > 1)
            return {nodes_[1].u, nodes_[1].du};
        return {zeta_ + series_c_ * r * r, 2.0 * series_c_ * r};
    }

    // segments_[i] spans nodes_[i+1] .. nodes_[i+2]
    auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                               [](double x, const Segment& s) { return x < s.r0; });
    const std::size_t idx = static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
    const Node& right = nodes_[idx + 2];
    if (r == right.r)
        return {right.u, right.du};
    const Node& left = nodes_[idx + 1];
    if (r == left.r)
        return {left.u, left.du};
    const Segment& s = segments_[idx];
    const double theta = (r - s.r0) / s.h;
    return {detail::dense_eval(s.cu, theta), detail::dense_eval(s.cdu, theta)};
}

double Trajectory::second_derivative(double r) const
{
    if (r == 0.0)
        return 2.0 * series_c_;
    const State st = eval(r);
    return -(dimension_ - 1) / r * st.du - rhs_.F(r, st.u);
}

double Trajectory::sup_norm() const
{
    double m = 0.0;
    for (const Node& n : nodes_)
        m = std::max(m, std::abs(n.u));
    return m;
}

double Trajectory::sup_norm_derivative() const
{
    double m = 0.0;
    for (const Node& n : nodes_)
        m = std::max(m, std::abs(n.du));
    return m;
}

Trajectory Trajectory::shifted(double offset) const
{
    Trajectory out = *this;
    out.zeta_ += offset;
    for (Node& n : out.nodes_)
        n.u += offset;
    for (Segment& s : out.segments_)
        s.cu[0] += offset;
    auto F = rhs_.F;
    out.rhs_.F = [F, offset](double r, double u) { return F(r, u - offset); };
    return out;
}

void Trajectory::write_csv(std::ostream& os) const
{
    os << "r,u,du\n";
    for (const Node& n : nodes_)
        os << format_real(n.r) << ',' << format_real(n.u) << ',' << format_real(n.du) << '\n';
}

}  // namespace radneumann
