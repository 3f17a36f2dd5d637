#pragma once

#include <optional>
#include <vector>

#include "pmelab/field.hpp"
#include "pmelab/geometry.hpp"

namespace pmelab {

/// Warped product of a weighted flat torus (base, weight f) with a flat unit-volume
/// q-torus fiber, metric g + w^2 g_fiber, w = e^{-f/q}, q = m - n.
///
/// Functions on the total space are base functions constant along the fibers,
/// so every quantity is stored on the base grid. Fiber indices are symbolic:
/// each fiber direction behaves identically, so a single representative is kept.
class WarpedGeometry {
 public:
  /// Throws std::invalid_argument unless base->m_param() - base->dim() is an integer >= 1.
  explicit WarpedGeometry(GeometryPtr base);

  const GeometryPtr& base() const noexcept { return base_; }
  int fiber_dim() const noexcept { return q_; }
  const ScalarField& warp() const noexcept { return warp_; }
  /// g_fiber coefficient w^2.
  const ScalarField& fiber_metric() const noexcept { return fiber_metric_; }

  /// int w^q dV over the base, the volume of the total space.
  double volume() const;

 private:
  GeometryPtr base_;
  int q_ = 1;
  ScalarField warp_;
  ScalarField fiber_metric_;
};

enum class ChristoffelMode { closed_form, finite_difference };

/// Christoffel symbols of the warped metric, one field per base axis. The
/// families not stored (base-base-base, fiber-fiber-fiber, base-base-fiber)
/// vanish for a flat base and flat fiber, and are kept as zero fields.
struct ChristoffelTable {
  /// Gamma^alpha_{i alpha} (no sum) = w_i / w.
  std::vector<ScalarField> mixed;
  /// Gamma^k_{alpha alpha} (no sum) = -w w_k.
  std::vector<ScalarField> fiber;
  /// Gamma^k_{ij}, indexed [k][SymTensorField::slot(i, j)]; zero on a flat base.
  std::vector<std::vector<ScalarField>> base;
};

/// closed_form uses the centered difference of f: w_i/w = -f_i/q and
/// -w w_k = (f_k/q) w^2. finite_difference differentiates the metric
/// coefficient w^2 directly: D_i(w^2) / (2 w^2) and -D_k(w^2) / 2.
ChristoffelTable christoffel(const WarpedGeometry& warped, ChristoffelMode mode);

/// Components of the warped Hessian of a base function v.
struct WarpedHessian {
  SymTensorField base_block;         ///< Hess_{ij}
  std::vector<ScalarField> mixed;    ///< Hess_{i alpha}, per base axis
  ScalarField fiber;                 ///< Hess_{alpha alpha}; off-diagonal fiber entries vanish
};

/// Hess_{ab} = d_a d_b v - Gamma^c_{ab} d_c v with d_alpha v = 0.
WarpedHessian warped_hessian(const ScalarField& v, const ChristoffelTable& table);

struct ComponentResiduals {
  double base_block = 0.0;  ///< max |Hess_{ij} - base Hessian|
  double mixed = 0.0;       ///< max |Hess_{i alpha}|
  double fiber = 0.0;       ///< max |Hess_{alpha alpha} + (1/q) w^2 <grad v, grad f>|
  double max() const;
};

ComponentResiduals hessian_components_check(const WarpedGeometry& warped, const ScalarField& v,
                                            ChristoffelMode mode = ChristoffelMode::closed_form);

/// max |trace of the warped Hessian - Delta_f v| over the base nodes.
double warped_laplacian_check(const WarpedGeometry& warped, const ScalarField& v,
                              ChristoffelMode mode = ChristoffelMode::closed_form);

/// Nodewise max of
///   | |Hess + c gbar|^2_gbar - |Hess v + c g|^2 - (1/q)(<grad v, grad f> - q c)^2 | / max(1, LHS),
/// c = eta / (m (gamma-1)), the left side assembled from the full warped Hessian.
/// The division keeps the residual at round-off level for large Hessians.
double hessian_norm_decomposition_check(const WarpedGeometry& warped, const ScalarField& v,
                                        double eta, double gamma,
                                        ChristoffelMode mode = ChristoffelMode::closed_form);

/// Horizontal Ricci block of the warped metric,
///   R_ij = d_l Gamma^l_ij - d_j Gamma^l_il + Gamma^l_lp Gamma^p_ij - Gamma^l_jp Gamma^p_il,
/// from finite-difference Christoffel symbols differentiated once more.
SymTensorField warped_ricci(const WarpedGeometry& warped);

struct RicciLiftReport {
  /// Against Hess f - df (x) df / q built from centered differences of f.
  double discrete = 0.0;
  /// Against the analytic f'' - f'^2/q when the weight was given by formula.
  std::optional<double> analytic;
};

RicciLiftReport ricci_lift_check(const WarpedGeometry& warped);

struct ChristoffelAgreement {
  /// max |closed_form - finite_difference| over all stored symbols.
  double modes = 0.0;
  /// max |finite_difference - exact symbols of the analytic weight|, when available.
  std::optional<double> analytic;
};

ChristoffelAgreement christoffel_agreement(const WarpedGeometry& warped);

/// log2(e_k / e_{k+1}) for errors on successively halved grids.
std::vector<double> convergence_orders(const std::vector<double>& errors);

}  // namespace pmelab
