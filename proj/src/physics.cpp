#include "sweptgrid/physics.hpp"

#include <cmath>
#include <numbers>

namespace sweptgrid {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* problem_name(Problem p) {
    return p == Problem::Heat ? "heat" : "euler";
}

Problem problem_from_name(const std::string& s) {
    if (s == "heat") return Problem::Heat;
    if (s == "euler") return Problem::Euler;
    throw std::invalid_argument("unknown problem: " + s);
}

StencilShape stencil_for(Problem p) {
    return p == Problem::Heat ? StencilShape::heat() : StencilShape::euler();
}

int nvars_for(Problem p) { return p == Problem::Heat ? 1 : 4; }

VortexSpec VortexSpec::standard(double gamma) {
    VortexSpec s;
    s.alpha = kPi / 4.0;
    s.mach = std::sqrt(2.0 / gamma);
    s.rho_inf = 1.0;
    s.t_inf = 1.0;
    s.radius = 1.0;
    s.sigma = 1.0;
    s.beta = s.mach * (5.0 * std::sqrt(2.0) / (4.0 * kPi)) * std::exp(0.5);
    s.half_extent = 5.0;
    return s;
}

void VortexSpec::validate() const {
    if (mach <= 0 || rho_inf <= 0 || t_inf <= 0 || radius <= 0 || sigma <= 0 ||
        beta <= 0 || half_extent <= 0)
        throw std::invalid_argument("VortexSpec: all fields must be positive");
}

double heat_analytic(double x, double y, double t, double alpha) {
    return std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y) *
           std::exp(-8.0 * kPi * kPi * alpha * t);
}

double pressure(const Vec4& q, double gamma) {
    const double rho = q[0];
    if (!(rho > 0.0))
        throw NonPhysicalState("non-physical state: rho <= 0");
    const double p =
        (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / rho);
    if (!(p > 0.0))
        throw NonPhysicalState("non-physical state: p <= 0");
    return p;
}

Vec4 euler_flux_x(const Vec4& q, double gamma) {
    const double p = pressure(q, gamma);
    const double u = q[1] / q[0];
    return {q[1], q[1] * u + p, q[2] * u, (q[3] + p) * u};
}

Vec4 euler_flux_y(const Vec4& q, double gamma) {
    const double p = pressure(q, gamma);
    const double v = q[2] / q[0];
    return {q[2], q[1] * v, q[2] * v + p, (q[3] + p) * v};
}

void minmod_reconstruct(const Vec4& q_im1, const Vec4& q_i, const Vec4& q_ip1,
                        const Vec4& q_ip2, double p_im1, double p_i,
                        double p_ip1, double p_ip2, Vec4& q_left, Vec4& q_right) {
    const double ratio = (p_ip1 - p_i) / (p_i - p_im1);
    if (std::isfinite(ratio) && ratio > 0.0) {
        const double w = 0.5 * std::min(ratio, 1.0);
        for (int v = 0; v < 4; ++v) q_left[v] = q_i[v] + w * (q_ip1[v] - q_i[v]);
    } else {
        q_left = q_i;
    }
    const double inv = (p_ip1 - p_i) / (p_ip2 - p_ip1);  // 1 / P_{r,i+1}
    if (std::isfinite(inv) && inv > 0.0) {
        const double w = 0.5 * std::min(inv, 1.0);
        for (int v = 0; v < 4; ++v) q_right[v] = q_ip1[v] + w * (q_i[v] - q_ip1[v]);
    } else {
        q_right = q_ip1;
    }
}

Vec4 interface_flux(const Vec4& ql, const Vec4& qr, int axis, double gamma) {
    const double pl = pressure(ql, gamma);
    const double pr = pressure(qr, gamma);
    const double unl = (axis == 0 ? ql[1] : ql[2]) / ql[0];
    const double unr = (axis == 0 ? qr[1] : qr[2]) / qr[0];
    const double rsp = std::max(std::abs(unl) + std::sqrt(gamma * pl / ql[0]),
                                std::abs(unr) + std::sqrt(gamma * pr / qr[0]));
    const Vec4 fl = axis == 0 ? euler_flux_x(ql, gamma) : euler_flux_y(ql, gamma);
    const Vec4 fr = axis == 0 ? euler_flux_x(qr, gamma) : euler_flux_y(qr, gamma);
    Vec4 f;
    for (int v = 0; v < 4; ++v)
        f[v] = 0.5 * (fl[v] + fr[v] + rsp * (ql[v] - qr[v]));
    return f;
}

Vec4 reconstructed_flux_x(const GridView& q, int x, int y, double gamma) {
    const Vec4 qm1 = load_q(q, x - 1, y);
    const Vec4 q0 = load_q(q, x, y);
    const Vec4 qp1 = load_q(q, x + 1, y);
    const Vec4 qp2 = load_q(q, x + 2, y);
    Vec4 ql, qr;
    minmod_reconstruct(qm1, q0, qp1, qp2, pressure(qm1, gamma), pressure(q0, gamma),
                       pressure(qp1, gamma), pressure(qp2, gamma), ql, qr);
    return interface_flux(ql, qr, 0, gamma);
}

Vec4 reconstructed_flux_y(const GridView& q, int x, int y, double gamma) {
    const Vec4 qm1 = load_q(q, x, y - 1);
    const Vec4 q0 = load_q(q, x, y);
    const Vec4 qp1 = load_q(q, x, y + 1);
    const Vec4 qp2 = load_q(q, x, y + 2);
    Vec4 ql, qr;
    minmod_reconstruct(qm1, q0, qp1, qp2, pressure(qm1, gamma), pressure(q0, gamma),
                       pressure(qp1, gamma), pressure(qp2, gamma), ql, qr);
    return interface_flux(ql, qr, 1, gamma);
}

Vec4 euler_predictor_point(const GridView& qn, int x, int y, const EulerParams& p) {
    const Vec4 fe = reconstructed_flux_x(qn, x, y, p.gamma);
    const Vec4 fw = reconstructed_flux_x(qn, x - 1, y, p.gamma);
    const Vec4 gn = reconstructed_flux_y(qn, x, y, p.gamma);
    const Vec4 gs = reconstructed_flux_y(qn, x, y - 1, p.gamma);
    const double cx = 0.5 * p.dt / p.dx;
    const double cy = 0.5 * p.dt / p.dy;
    Vec4 out;
    for (int v = 0; v < 4; ++v)
        out[v] = qn.at(v, x, y) - cx * (fe[v] - fw[v]) - cy * (gn[v] - gs[v]);
    return out;
}

Vec4 euler_corrector_point(const GridView& qn, const GridView& qstar, int x, int y,
                           const EulerParams& p) {
    const Vec4 fe = reconstructed_flux_x(qstar, x, y, p.gamma);
    const Vec4 fw = reconstructed_flux_x(qstar, x - 1, y, p.gamma);
    const Vec4 gn = reconstructed_flux_y(qstar, x, y, p.gamma);
    const Vec4 gs = reconstructed_flux_y(qstar, x, y - 1, p.gamma);
    const double cx = p.dt / p.dx;
    const double cy = p.dt / p.dy;
    Vec4 out;
    for (int v = 0; v < 4; ++v)
        out[v] = qn.at(v, x, y) - cx * (fe[v] - fw[v]) - cy * (gn[v] - gs[v]);
    return out;
}

Vec4 vortex_state(double x, double y, const VortexSpec& s, double gamma) {
    const double f = -0.5 / (s.sigma * s.sigma) *
                     ((x / s.radius) * (x / s.radius) + (y / s.radius) * (y / s.radius));
    const double omega = s.beta * std::exp(f);
    const double du = -(y / s.radius) * omega;
    const double dv = (x / s.radius) * omega;
    const double dt_pert = -0.5 * (gamma - 1.0) * omega * omega;
    const double base = 1.0 + dt_pert;
    if (!(base > 0.0))
        throw NonPhysicalState("vortex perturbation drives 1 + dT <= 0");
    const double rho = std::pow(base, 1.0 / (gamma - 1.0));
    const double u = s.mach * std::cos(s.alpha) + du;
    const double v = s.mach * std::sin(s.alpha) + dv;
    const double p = (1.0 / gamma) * std::pow(base, gamma / (gamma - 1.0));
    const double e = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v);
    return {rho, rho * u, rho * v, e};
}

FieldState vortex_init(int nx, int ny, const VortexSpec& s, double gamma) {
    s.validate();
    FieldState field(4, nx, ny, 0);
    const double l = s.half_extent;
    const double dx = 2.0 * l / nx;
    const double dy = 2.0 * l / ny;
    for (int j = 0; j < ny; ++j) {
        const double y = -l + (j + 0.5) * dy;
        for (int i = 0; i < nx; ++i) {
            const double x = -l + (i + 0.5) * dx;
            const Vec4 q = vortex_state(x, y, s, gamma);
            for (int v = 0; v < 4; ++v) field.at(v, i, j) = q[v];
        }
    }
    return field;
}

FieldState vortex_analytic(int nx, int ny, const VortexSpec& s, double gamma, double t) {
    s.validate();
    FieldState field(4, nx, ny, 0);
    const double l = s.half_extent;
    const double dx = 2.0 * l / nx;
    const double dy = 2.0 * l / ny;
    const double ux = s.mach * std::cos(s.alpha);
    const double uy = s.mach * std::sin(s.alpha);
    auto wrap = [l](double c) {
        const double span = 2.0 * l;
        c = std::fmod(c + l, span);
        if (c < 0) c += span;
        return c - l;
    };
    for (int j = 0; j < ny; ++j) {
        const double y = wrap(-l + (j + 0.5) * dy - uy * t);
        for (int i = 0; i < nx; ++i) {
            const double x = wrap(-l + (i + 0.5) * dx - ux * t);
            const Vec4 q = vortex_state(x, y, s, gamma);
            for (int v = 0; v < 4; ++v) field.at(v, i, j) = q[v];
        }
    }
    return field;
}

namespace {

inline void substep_row(const SubstepArgs& a, int x0, int x1, int y) {
    GridSpan out = a.out;
    switch (a.problem) {
        case Problem::Heat:
            for (int x = x0; x < x1; ++x)
                out.at(0, x, y) = heat_point(a.read1, x, y, a.heat);
            break;
        case Problem::Euler:
            if (a.stage == 0) {
                for (int x = x0; x < x1; ++x) {
                    const Vec4 q = euler_predictor_point(a.read1, x, y, a.euler);
                    for (int v = 0; v < 4; ++v) out.at(v, x, y) = q[v];
                }
            } else {
                for (int x = x0; x < x1; ++x) {
                    const Vec4 q = euler_corrector_point(a.read2, a.read1, x, y, a.euler);
                    for (int v = 0; v < 4; ++v) out.at(v, x, y) = q[v];
                }
            }
            break;
    }
}

/// Rusanov flux with the two pressures computed once and reused; bitwise
/// identical to interface_flux, which re-derives them inside the flux vectors.
inline Vec4 fused_interface(const Vec4& ql, const Vec4& qr, int axis, double gamma) {
    const double pl = pressure(ql, gamma);
    const double pr = pressure(qr, gamma);
    const double unl = (axis == 0 ? ql[1] : ql[2]) / ql[0];
    const double unr = (axis == 0 ? qr[1] : qr[2]) / qr[0];
    const double rsp = std::max(std::abs(unl) + std::sqrt(gamma * pl / ql[0]),
                                std::abs(unr) + std::sqrt(gamma * pr / qr[0]));
    Vec4 fl, fr;
    if (axis == 0) {
        fl = {ql[1], ql[1] * unl + pl, ql[2] * unl, (ql[3] + pl) * unl};
        fr = {qr[1], qr[1] * unr + pr, qr[2] * unr, (qr[3] + pr) * unr};
    } else {
        fl = {ql[2], ql[1] * unl, ql[2] * unl + pl, (ql[3] + pl) * unl};
        fr = {qr[2], qr[1] * unr, qr[2] * unr + pr, (qr[3] + pr) * unr};
    }
    Vec4 f;
    for (int v = 0; v < 4; ++v)
        f[v] = 0.5 * (fl[v] + fr[v] + rsp * (ql[v] - qr[v]));
    return f;
}

/// Row-cached Euler sub-step: loads the five contributing rows once, keeps
/// per-point pressures, and shares each x-interface flux between the two
/// cells that straddle it.  Produces bit-identical results to the point-wise
/// reference path.
void euler_row_fast(const SubstepArgs& a, int x0, int x1, int y) {
    const GridView& src = a.read1;                          // flux source level
    const GridView& base = a.stage == 0 ? a.read1 : a.read2;  // conservative base
    const double g = a.euler.gamma;
    const double cx = (a.stage == 0 ? 0.5 : 1.0) * a.euler.dt / a.euler.dx;
    const double cy = (a.stage == 0 ? 0.5 : 1.0) * a.euler.dt / a.euler.dy;
    const int w = x1 - x0, wp = w + 4;

    thread_local std::vector<Vec4> qrows;
    thread_local std::vector<double> prows;
    thread_local std::vector<Vec4> fx;
    qrows.resize(static_cast<std::size_t>(5) * wp);
    prows.resize(static_cast<std::size_t>(5) * wp);
    fx.resize(w + 1);

    for (int r = 0; r < 5; ++r) {
        const int yy = y + r - 2;
        for (int i = 0; i < wp; ++i) {
            const Vec4 q = load_q(src, x0 - 2 + i, yy);
            qrows[static_cast<std::size_t>(r) * wp + i] = q;
            prows[static_cast<std::size_t>(r) * wp + i] = pressure(q, g);
        }
    }

    const Vec4* qy = &qrows[static_cast<std::size_t>(2) * wp];
    const double* py = &prows[static_cast<std::size_t>(2) * wp];
    for (int xi = 0; xi <= w; ++xi) {  // flux through interface x0 - 1/2 + xi
        Vec4 ql, qr;
        minmod_reconstruct(qy[xi], qy[xi + 1], qy[xi + 2], qy[xi + 3],
                           py[xi], py[xi + 1], py[xi + 2], py[xi + 3], ql, qr);
        fx[xi] = fused_interface(ql, qr, 0, g);
    }

    GridSpan out = a.out;
    for (int x = x0; x < x1; ++x) {
        const std::size_t i = static_cast<std::size_t>(x - x0) + 2;
        Vec4 ql, qr;
        minmod_reconstruct(qrows[wp + i], qrows[2 * wp + i], qrows[3 * wp + i],
                           qrows[4 * wp + i], prows[wp + i], prows[2 * wp + i],
                           prows[3 * wp + i], prows[4 * wp + i], ql, qr);
        const Vec4 gn = fused_interface(ql, qr, 1, g);
        minmod_reconstruct(qrows[i], qrows[wp + i], qrows[2 * wp + i],
                           qrows[3 * wp + i], prows[i], prows[wp + i],
                           prows[2 * wp + i], prows[3 * wp + i], ql, qr);
        const Vec4 gs = fused_interface(ql, qr, 1, g);
        const Vec4& fe = fx[x - x0 + 1];
        const Vec4& fw = fx[x - x0];
        for (int v = 0; v < 4; ++v)
            out.at(v, x, y) =
                base.at(v, x, y) - cx * (fe[v] - fw[v]) - cy * (gn[v] - gs[v]);
    }
}

inline void substep_row_fast(const SubstepArgs& a, int x0, int x1, int y) {
    if (a.problem == Problem::Euler)
        euler_row_fast(a, x0, x1, y);
    else
        substep_row(a, x0, x1, y);
}

struct RowTask {
    int x0, x1, y;
    int repeats;
};

std::vector<RowTask> flatten(std::span<const CellBlock> blocks) {
    std::vector<RowTask> rows;
    for (const CellBlock& b : blocks)
        for (int y = b.rect.y0; y < b.rect.y1; ++y)
            rows.push_back({b.rect.x0, b.rect.x1, y, b.repeats});
    return rows;
}

}  // namespace

void run_substep_serial(const SubstepArgs& args, std::span<const CellBlock> blocks) {
    for (const CellBlock& b : blocks)
        for (int r = 0; r < b.repeats; ++r)
            for (int y = b.rect.y0; y < b.rect.y1; ++y)
                substep_row(args, b.rect.x0, b.rect.x1, y);
}

void run_substep_omp(const SubstepArgs& args, std::span<const CellBlock> blocks,
                     int threads) {
    const std::vector<RowTask> rows = flatten(blocks);
    const long n = static_cast<long>(rows.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        try {
            const RowTask& t = rows[i];
            for (int r = 0; r < t.repeats; ++r)
                substep_row_fast(args, t.x0, t.x1, t.y);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace sweptgrid
