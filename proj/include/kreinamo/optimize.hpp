#pragma once

#include <functional>
#include <vector>

namespace kreinamo {

struct NelderMeadOptions {
    int max_evaluations = 400;
    double x_tolerance = 1e-9;   // simplex diameter
    double f_tolerance = 1e-14;  // spread of vertex values
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Downhill simplex with the standard coefficients (1, 2, 1/2, 1/2). The
/// initial simplex is x0 plus step[i] along each axis.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             const NelderMeadOptions& opt = {});

}  // namespace kreinamo
