#include "crane3d/signals.hpp"

#include <algorithm>

namespace crane3d {

InputVector InputSignal::eval_saturated(double t, double u_sat) const {
    auto clamp = [u_sat](double v) { return std::clamp(v, -u_sat, u_sat); };
    InputVector u = eval(t);
    return {clamp(u.u_x), clamp(u.u_y), clamp(u.u_l)};
}

std::vector<double> InputSignal::breakpoints(double t_end) const {
    std::vector<double> bp;
    x.append_breakpoints(t_end, bp);
    y.append_breakpoints(t_end, bp);
    l.append_breakpoints(t_end, bp);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

} // namespace crane3d
