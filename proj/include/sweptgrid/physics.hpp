#ifndef SWEPTGRID_PHYSICS_HPP
#define SWEPTGRID_PHYSICS_HPP

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "sweptgrid/field.hpp"
#include "sweptgrid/geometry.hpp"

namespace sweptgrid {

enum class Problem { Heat, Euler };
const char* problem_name(Problem p);
Problem problem_from_name(const std::string& s);

struct NonPhysicalState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec4 = std::array<double, 4>;

struct HeatParams {
    double alpha = 1.0;
    double dx = 0.0, dy = 0.0, dt = 0.0;

    double fourier_sum() const { return alpha * dt * (1.0 / (dx * dx) + 1.0 / (dy * dy)); }
};

struct EulerParams {
    double gamma = 1.4;
    double dx = 0.0, dy = 0.0, dt = 0.0;
    double cfl = 0.4;
};

/// Isentropic vortex free-stream and perturbation constants.
struct VortexSpec {
    double alpha;     // flow angle, radians
    double mach;      // M_inf
    double rho_inf;
    double t_inf;
    double radius;    // R
    double sigma;
    double beta;
    double half_extent;  // L; domain is [-L, L)^2

    static VortexSpec standard(double gamma);
    void validate() const;
};

// ---- heat diffusion ----

double heat_analytic(double x, double y, double t, double alpha);

/// FTCS update for one point; `in` holds the previous level.
inline double heat_point(const GridView& in, int x, int y, const HeatParams& p) {
    const double fx = p.alpha * p.dt / (p.dx * p.dx);
    const double fy = p.alpha * p.dt / (p.dy * p.dy);
    const double c = in.at(0, x, y);
    return c + fx * (in.at(0, x + 1, y) - 2.0 * c + in.at(0, x - 1, y)) +
           fy * (in.at(0, x, y + 1) - 2.0 * c + in.at(0, x, y - 1));
}

// ---- compressible Euler ----

/// p = (gamma-1)(E - rho(u^2+v^2)/2).  Throws NonPhysicalState for rho <= 0
/// or p <= 0.
double pressure(const Vec4& q, double gamma);

Vec4 euler_flux_x(const Vec4& q, double gamma);
Vec4 euler_flux_y(const Vec4& q, double gamma);

/// Pressure-ratio minmod reconstruction at interface i+1/2 from the four-cell
/// stencil.  Falls back to the unreconstructed cell value whenever the ratio
/// is non-finite or non-positive.
void minmod_reconstruct(const Vec4& q_im1, const Vec4& q_i, const Vec4& q_ip1,
                        const Vec4& q_ip2, double p_im1, double p_i,
                        double p_ip1, double p_ip2, Vec4& q_left, Vec4& q_right);

/// Rusanov interface flux: 0.5 (F(QL) + F(QR) + r_sp (QL - QR)) with r_sp the
/// larger |u_n| + sqrt(gamma p / rho) of the two states.  axis 0 = x, 1 = y.
Vec4 interface_flux(const Vec4& q_left, const Vec4& q_right, int axis, double gamma);

inline Vec4 load_q(const GridView& g, int x, int y) {
    return {g.at(0, x, y), g.at(1, x, y), g.at(2, x, y), g.at(3, x, y)};
}

/// Full reconstructed flux at interface (x+1/2, y) resp. (x, y+1/2).
Vec4 reconstructed_flux_x(const GridView& q, int x, int y, double gamma);
Vec4 reconstructed_flux_y(const GridView& q, int x, int y, double gamma);

/// RK2 predictor: half-step conservative update evaluated on level n.
Vec4 euler_predictor_point(const GridView& qn, int x, int y, const EulerParams& p);
/// RK2 corrector: full-step update with fluxes from the predictor level.
Vec4 euler_corrector_point(const GridView& qn, const GridView& qstar, int x, int y,
                           const EulerParams& p);

// ---- vortex problem ----

/// Primitive-to-conserved initial state at physical position (x, y).
Vec4 vortex_state(double x, double y, const VortexSpec& spec, double gamma);

FieldState vortex_init(int nx, int ny, const VortexSpec& spec, double gamma);
/// Initial condition translated by the free stream for time t, periodic wrap.
FieldState vortex_analytic(int nx, int ny, const VortexSpec& spec, double gamma, double t);

// ---- region drivers ----

struct Rect {
    int x0, x1, y0, y1;  // half-open; y wraps modulo the plane height
};

struct CellBlock {
    Rect rect;
    int repeats = 1;  // worker-pool cost multiplier, as whole kernel passes
};

struct SubstepArgs {
    Problem problem;
    int stage = 0;           // 0 = heat / predictor, 1 = corrector
    GridView read1;          // level - 1
    GridView read2;          // level - 2 (corrector only)
    GridSpan out;
    HeatParams heat;
    EulerParams euler;
};

/// Advance every cell of every block one sub-step.  The OpenMP variant
/// parallelizes over block rows; the serial variant is the reference
/// implementation the tests and benchmark compare against.
void run_substep_serial(const SubstepArgs& args, std::span<const CellBlock> blocks);
void run_substep_omp(const SubstepArgs& args, std::span<const CellBlock> blocks,
                     int threads);

StencilShape stencil_for(Problem p);
int nvars_for(Problem p);

}  // namespace sweptgrid

#endif
