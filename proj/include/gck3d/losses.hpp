// Copyright 2026 The gck3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file losses.hpp
 *
 * Training losses as scalar functions with analytic gradients.
 *
 *   L        = L_boxes + L_params + L_class
 *   L_boxes  = alpha L_loc,init + beta L_loc,full + gamma L_loc,pix
 *   L_params = zeta L_s-ratio + eta L_depth + kappa L_offsets + mu L_a-ratios
 *   L_class  = nu L_F/B + xi L_L/R + tau L_cls
 *
 * 2D boxes use cos(IoU), parameters use L2, depth uses smooth L1, F/B and L/R
 * use sigmoid cross entropy and the class uses focal loss.
 */

#ifndef GCK3D__LOSSES_HPP_
#define GCK3D__LOSSES_HPP_

#include "gck3d/box2d.hpp"
#include "gck3d/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gck3d::losses
{

struct ScalarLoss
{
  double value{0.0};
  double gradient{0.0};
};

struct VectorLoss
{
  double value{0.0};
  std::vector<double> gradient;
};

/// d value / d (x_min, y_min, x_max, y_max) of the prediction.
struct BoxLoss
{
  double value{0.0};
  std::array<double, 4> gradient{};
};

struct LossWeights
{
  double alpha{1.0};
  double beta{1.0};
  double gamma{1.0};
  double zeta{1.0};
  double eta{0.5};
  double kappa{1.0};
  double mu{1.0};
  double nu{1.0};
  double xi{1.0};
  double tau{2.0};

  void validate() const
  {
    for (const double w : {alpha, beta, gamma, zeta, eta, kappa, mu, nu, xi, tau}) {
      if (!(w >= 0.0)) {
        throw Error(ErrorKind::InvalidParams, "loss weights must be non-negative");
      }
    }
  }

  LossWeights scaled(double f) const
  {
    return {alpha * f, beta * f, gamma * f, zeta * f, eta * f,
            kappa * f, mu * f,   nu * f,    xi * f,   tau * f};
  }
};

struct FocalParams
{
  double gamma{2.0};
  double alpha{0.25};
};

/**
 * cos(IoU) with the IoU used directly as the cosine argument. Decreasing on
 * [0, 1], so it is minimised at IoU = 1 where it equals cos(1).
 */
inline BoxLoss cos_iou_loss(const Box2D & pred, const Box2D & target)
{
  const double iw = std::min(pred.x_max, target.x_max) - std::max(pred.x_min, target.x_min);
  const double ih = std::min(pred.y_max, target.y_max) - std::max(pred.y_min, target.y_min);
  const bool overlap = iw > 0.0 && ih > 0.0;
  const double inter = overlap ? iw * ih : 0.0;
  const double pw = pred.x_max - pred.x_min;
  const double ph = pred.y_max - pred.y_min;
  const double uni = pw * ph + target.area() - inter;
  const double iou = uni > 0.0 ? inter / uni : 0.0;

  BoxLoss out;
  out.value = std::cos(iou);
  if (!overlap || !(uni > 0.0)) {
    return out;
  }

  // d inter / d coord: each coordinate only moves the intersection while it is the binding edge.
  std::array<double, 4> d_inter{};
  d_inter[0] = pred.x_min > target.x_min ? -ih : 0.0;
  d_inter[2] = pred.x_max < target.x_max ? ih : 0.0;
  d_inter[1] = pred.y_min > target.y_min ? -iw : 0.0;
  d_inter[3] = pred.y_max < target.y_max ? iw : 0.0;
  const std::array<double, 4> d_area{-ph, -pw, ph, pw};

  const double ds = -std::sin(iou);
  for (std::size_t k = 0; k < 4; ++k) {
    const double d_uni = d_area[k] - d_inter[k];
    const double d_iou = (d_inter[k] * uni - inter * d_uni) / (uni * uni);
    out.gradient[k] = ds * d_iou;
  }
  return out;
}

inline VectorLoss l2_loss(std::span<const double> pred, std::span<const double> target)
{
  if (pred.size() != target.size()) {
    throw Error(ErrorKind::LengthMismatch, "l2_loss operands differ in length");
  }
  VectorLoss out;
  out.gradient.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.value += d * d;
    out.gradient[i] = 2.0 * d;
  }
  return out;
}

/// Quadratic below |d| = 1, linear above.
inline ScalarLoss smooth_l1_loss(double pred, double target)
{
  const double d = pred - target;
  const double ad = std::abs(d);
  if (ad < 1.0) {
    return {0.5 * d * d, d};
  }
  return {ad - 0.5, d > 0.0 ? 1.0 : -1.0};
}

inline double sigmoid(double x)
{
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// max(x, 0) - x * label + log(1 + exp(-|x|)), gradient sigmoid(x) - label.
inline ScalarLoss sigmoid_ce_loss(double logit, double label)
{
  const double value =
    std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
  return {value, sigmoid(logit) - label};
}

/// -alpha (1 - p)^gamma log p on the label's probability; the gradient is w.r.t. every prob.
inline VectorLoss focal_loss(
  std::span<const double> probs, std::size_t label, const FocalParams & fp = {})
{
  if (label >= probs.size()) {
    throw Error(ErrorKind::LengthMismatch, "label index outside the probability vector");
  }
  if (!(fp.gamma >= 0.0)) {
    throw Error(ErrorKind::InvalidParams, "focal gamma must be non-negative");
  }
  const double p = probs[label];
  if (p < 1e-12) {
    throw Error(ErrorKind::DegenerateProbability, "label probability below 1e-12");
  }
  const double q = 1.0 - p;
  const double lp = std::log(p);
  VectorLoss out;
  out.gradient.assign(probs.size(), 0.0);
  const double mod = fp.gamma == 0.0 ? 1.0 : std::pow(q, fp.gamma);
  out.value = -fp.alpha * mod * lp;
  // d/dp [-a q^g log p] = a (g q^(g-1) log p - q^g / p)
  const double dmod = fp.gamma == 0.0 ? 0.0 : fp.gamma * std::pow(q, fp.gamma - 1.0);
  out.gradient[label] = fp.alpha * (dmod * lp - mod / p);
  return out;
}

/// Everything the loss terms of one matched detection compare.
struct LossTerms
{
  Box2D box_init{};
  Box2D box_full{};
  Box2D box_pix{};
  double side_ratio{0.0};
  double depth{0.0};
  std::array<double, 8> offsets{};
  std::array<double, 2> aspect{1.0, 1.0};
};

/// Prediction side: regression values plus raw logits / class probabilities.
struct LossPrediction
{
  LossTerms terms{};
  double fb_logit{0.0};
  double lr_logit{0.0};
  std::vector<double> class_probs{1.0};
};

/// Target side: regression values plus hard labels.
struct LossTarget
{
  LossTerms terms{};
  int fb_label{0};
  int lr_label{0};
  std::size_t class_label{0};
};

struct LossBreakdown
{
  double loc_init{0.0};
  double loc_full{0.0};
  double loc_pix{0.0};
  double s_ratio{0.0};
  double depth{0.0};
  double offsets{0.0};
  double a_ratios{0.0};
  double fb{0.0};
  double lr{0.0};
  double cls{0.0};
  double total{0.0};

  double weighted_sum(const LossWeights & w) const
  {
    return w.alpha * loc_init + w.beta * loc_full + w.gamma * loc_pix + w.zeta * s_ratio +
           w.eta * depth + w.kappa * offsets + w.mu * a_ratios + w.nu * fb + w.xi * lr +
           w.tau * cls;
  }
};

inline LossBreakdown total_loss(
  const LossPrediction & pred, const LossTarget & target, const LossWeights & w,
  const FocalParams & focal = {})
{
  w.validate();
  const LossTerms & p = pred.terms;
  const LossTerms & t = target.terms;
  LossBreakdown out;
  out.loc_init = cos_iou_loss(p.box_init, t.box_init).value;
  out.loc_full = cos_iou_loss(p.box_full, t.box_full).value;
  out.loc_pix = cos_iou_loss(p.box_pix, t.box_pix).value;
  const std::array<double, 1> ps{p.side_ratio};
  const std::array<double, 1> ts{t.side_ratio};
  out.s_ratio = l2_loss(ps, ts).value;
  out.depth = smooth_l1_loss(p.depth, t.depth).value;
  out.offsets = l2_loss(p.offsets, t.offsets).value;
  out.a_ratios = l2_loss(p.aspect, t.aspect).value;
  out.fb = sigmoid_ce_loss(pred.fb_logit, target.fb_label).value;
  out.lr = sigmoid_ce_loss(pred.lr_logit, target.lr_label).value;
  out.cls = focal_loss(pred.class_probs, target.class_label, focal).value;
  out.total = out.weighted_sum(w);
  return out;
}

}  // namespace gck3d::losses

#endif  // GCK3D__LOSSES_HPP_
