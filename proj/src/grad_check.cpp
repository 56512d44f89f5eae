#include "glyph/grad_check.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace glyph {

FdCheckResult fd_check(const std::function<double()>& loss,
                       std::span<double> params,
                       std::span<const double> analytic,
                       std::span<const std::size_t> indices,
                       double h) {
    if (params.size() != analytic.size())
        throw std::invalid_argument("fd_check: gradient shape mismatch");
    FdCheckResult res;
    for (std::size_t k : indices) {
        const double saved = params[k];
        params[k] = saved + h;
        const double up = loss();
        params[k] = saved - h;
        const double down = loss();
        params[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic[k] - fd) / std::max(1.0, std::abs(fd));
        if (rel > res.max_rel_error) {
            res.max_rel_error = rel;
            res.worst_index = k;
        }
        ++res.checked;
    }
    return res;
}

FdCheckResult fd_check_all(const std::function<double()>& loss,
                           std::span<double> params,
                           std::span<const double> analytic,
                           double h) {
    std::vector<std::size_t> idx(params.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return fd_check(loss, params, analytic, idx, h);
}

}  // namespace glyph
