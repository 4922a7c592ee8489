#include "arrowqp/verify.hpp"

#include <algorithm>
#include <sstream>

namespace arrowqp
{

namespace
{

double max_abs(const Vec& v)
{
    double r = 0.0;
    for (isize i = 0; i < v.size(); i++) r = std::max(r, std::abs(v[i]));
    return r;
}

// y += M x and y += M' x walking the compressed columns directly.
void add_product(const SparseMat& M, const Vec& x, Vec& y)
{
    for (isize j = 0; j < M.outerSize(); j++) {
        for (SparseMat::InnerIterator it(M, j); it; ++it) y[it.row()] += it.value() * x[j];
    }
}

void add_transpose_product(const SparseMat& M, const Vec& x, Vec& y)
{
    for (isize j = 0; j < M.outerSize(); j++) {
        for (SparseMat::InnerIterator it(M, j); it; ++it) y[j] += it.value() * x[it.row()];
    }
}

} // namespace

bool KktCertificate::accept(double eps_abs, double eps_rel) const
{
    const double tp = eps_abs + eps_rel * primal_scale;
    const double td = eps_abs + eps_rel * dual_scale;
    return equality <= tp && inequality <= tp && slack <= tp && stationarity <= td &&
           complementarity <= eps_abs + eps_rel * std::max(primal_scale, dual_scale) && min_s >= 0.0 && min_z >= 0.0;
}

std::string KktCertificate::to_string() const
{
    std::ostringstream os;
    os << "eq=" << equality << " ineq=" << inequality << " slack=" << slack << " stat=" << stationarity
       << " comp=" << complementarity << " min_s=" << min_s << " min_z=" << min_z;
    return os.str();
}

KktCertificate certify(const GeneralQP& qp, const Solution& sol)
{
    KktCertificate c;
    const Vec& x = sol.x;

    Vec Ax = Vec::Zero(qp.p);
    add_product(qp.A, x, Ax);
    Vec Gx = Vec::Zero(qp.m);
    add_product(qp.G, x, Gx);

    // P holds the lower triangle; mirror strictly-lower entries.
    Vec Px = Vec::Zero(qp.n);
    for (isize j = 0; j < qp.P.outerSize(); j++) {
        for (SparseMat::InnerIterator it(qp.P, j); it; ++it) {
            Px[it.row()] += it.value() * x[j];
            if (it.row() != j) Px[j] += it.value() * x[it.row()];
        }
    }
    Vec Aty = Vec::Zero(qp.n);
    add_transpose_product(qp.A, sol.y, Aty);
    Vec Gtz = Vec::Zero(qp.n);
    add_transpose_product(qp.G, sol.z, Gtz);

    c.equality = max_abs(Ax - qp.b);
    c.inequality = max_abs((Gx - qp.h).cwiseMax(0.0));
    c.slack = max_abs(Gx + sol.s - qp.h);
    c.stationarity = max_abs(Px + qp.c + Aty + Gtz);
    c.complementarity = max_abs(sol.s.cwiseProduct(sol.z));
    c.min_s = qp.m > 0 ? sol.s.minCoeff() : 0.0;
    c.min_z = qp.m > 0 ? sol.z.minCoeff() : 0.0;
    c.primal_scale = std::max({max_abs(Ax), max_abs(qp.b), max_abs(Gx), max_abs(sol.s), max_abs(qp.h)});
    c.dual_scale = std::max({max_abs(Px), max_abs(qp.c), max_abs(Aty), max_abs(Gtz)});
    return c;
}

} // namespace arrowqp
