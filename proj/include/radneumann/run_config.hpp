#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "radneumann/nonlinearity.hpp"
#include "radneumann/spectrum.hpp"

namespace radneumann {

struct RunConfig {
    std::string subcommand;
    int dim = 2;
    int k = 2;
    int k_max = 5;
    int sign = 1;
    std::string family = "rational:120,1,1";
    std::string f_path;  // config file; takes precedence over family when set
    std::string weight = "unit";
    double tol = 1e-12;
    std::string out;
    std::string suite = "all";
    std::uint64_t seed = 1;
    bool parallel = false;

    /// One `key=value` line per field in a fixed order.
    std::string canonical() const;
    static RunConfig from_canonical(const std::string& text);

    /// Throws Error(Precondition) on values outside their domains.
    void validate() const;

    Tolerances tolerances() const;
    NonlinearitySpec nonlinearity() const;
    WeightFn weight_fn() const;
};

/// Parses `rational:A,C,beta`.
NonlinearitySpec parse_family_selector(const std::string& text);

}  // namespace radneumann
