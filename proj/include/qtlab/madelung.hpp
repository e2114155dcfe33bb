#ifndef QTLAB_MADELUNG_HPP
#define QTLAB_MADELUNG_HPP

#include <vector>

#include "qtlab/evolution.hpp"
#include "qtlab/field_core.hpp"

namespace qtlab {

/// Points with rho below this fraction of max(rho) are masked out.
inline constexpr double kRhoFloorFraction = 1e-8;

/**
 * Polar decomposition psi = R exp(iS) and the fields derived from it.
 *
 * Every derived field is NaN where `mask` is false. `S` is continuous along
 * each unmasked run of points; across a masked gap it restarts from the
 * principal phase.
 */
struct MadelungFields {
    Grid1D grid;
    double t = 0.0;
    RealField rho;
    RealField S;
    RealField grad_S;     ///< Bohm momentum Im(psi* psi')/rho
    RealField p_osmotic;  ///< rho'/(2 rho)
    RealField Q;          ///< -(1/2m) R''/R
    RealField grad_Q;
    Mask mask;
    Index reference = 0;  ///< index of the density maximum anchoring S
};

/// Weak value of momentum <x|P|psi>/<x|psi>, NaN where masked.
struct WeakValueField {
    Grid1D grid;
    double t = 0.0;
    ComplexField w;
    Mask mask;
};

struct BohmOsmoticSplit {
    RealField p_bohm;
    RealField p_osmotic;
    Mask mask;
    /// max |split - decompose()| over the mask, for both momenta
    double max_deviation = 0.0;
};

/// Per-snapshot residual fields of a balance equation. fields[i] belongs to
/// times[i]; entries outside masks[i] are NaN.
struct ResidualSeries {
    std::vector<double> times;
    std::vector<RealField> fields;
    std::vector<Mask> masks;

    double max_abs() const;
    double max_abs(size_t i) const;
};

MadelungFields decompose(const WaveFunction& psi, double mass = 1.0);

/// decompose() for every snapshot, with S shifted by multiples of 2 pi so
/// S(x_ref) varies continuously in time at each snapshot's reference point.
std::vector<MadelungFields> decompose_series(const SnapshotSeries& series, double mass);

WeakValueField weak_momentum(const WaveFunction& psi);

/// p_B = (w + conj w)/2, p_o = i (w - conj w)/2, compared against decompose().
BohmOsmoticSplit bohm_osmotic_split(const WaveFunction& psi);

/// d rho/dt + d/dx (rho grad_S / m), time derivative by central differences.
ResidualSeries continuity_residual(const SnapshotSeries& series, double mass);

/// dS/dt + (dS/dx)^2/2m + Q + V.
ResidualSeries qhj_residual(const SnapshotSeries& series, double mass, const Potential& v);

/// Momentum-representation energy equation for V = K x^2/2:
/// dS_p/dt + p^2/2m + (K/2) x_r^2 - (K/2) R_p''/R_p with x_r = -dS_p/dp.
ResidualSeries qhj_residual_p(const std::vector<MomentumWaveFunction>& series, double mass,
                              double spring);
ResidualSeries qhj_residual_p(const SnapshotSeries& series, double mass, double spring);

namespace detail {

/// Phase field integrated from `grad` outward from `reference` and snapped
/// onto the branch of arg(amps) nearest the running integral.
RealField integrate_phase(const ComplexField& amps, const RealField& grad, const Mask& mask,
                          double spacing, Index reference);

/// Shift each phase field by 2 pi multiples to follow its predecessor at
/// its own reference point.
void anchor_in_time(std::vector<RealField>& phases, const std::vector<Mask>& masks,
                    const std::vector<Index>& references);

} // namespace detail

} // namespace qtlab

#endif
