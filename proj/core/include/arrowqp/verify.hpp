#ifndef ARROWQP_VERIFY_HPP
#define ARROWQP_VERIFY_HPP

#include <string>

#include "arrowqp/qp_model.hpp"

namespace arrowqp
{

// Optimality measures recomputed from the problem data alone.
struct KktCertificate
{
    double equality = 0.0;       // ||Ax - b||_inf
    double inequality = 0.0;     // ||max(Gx - h, 0)||_inf
    double slack = 0.0;          // ||Gx + s - h||_inf
    double stationarity = 0.0;   // ||Px + c + A'y + G'z||_inf
    double complementarity = 0.0; // max_i |s_i z_i|
    double min_s = 0.0;
    double min_z = 0.0;
    double primal_scale = 0.0;
    double dual_scale = 0.0;

    // True when every measure is within eps_abs + eps_rel * scale and s, z are
    // non-negative.
    bool accept(double eps_abs, double eps_rel) const;
    std::string to_string() const;
};

KktCertificate certify(const GeneralQP& qp, const Solution& solution);

} // namespace arrowqp

#endif
