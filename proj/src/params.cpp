#include "microlaser/params.hpp"

#include <cmath>
#include <sstream>

#include "microlaser/errors.hpp"

namespace microlaser {

void SystemParams::validate() const {
    if (!(std::isfinite(g_tau) && g_tau > 0.0))
        throw InvalidArgument("g_tau must be finite and > 0");
    if (!(std::isfinite(gamma_c_tau) && gamma_c_tau > 0.0))
        throw InvalidArgument("gamma_c_tau must be finite and > 0");
    if (!(std::isfinite(n_atoms) && n_atoms >= 0.0))
        throw InvalidArgument("n_atoms must be finite and >= 0");
    if (!std::isfinite(delta_tau))
        throw InvalidArgument("delta_tau must be finite");
}

std::string SystemParams::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << "g_tau=" << g_tau << " gamma_c_tau=" << gamma_c_tau << " N=" << n_atoms
       << " delta/gamma_c=" << delta_over_gamma_c();
    return os.str();
}

}  // namespace microlaser
