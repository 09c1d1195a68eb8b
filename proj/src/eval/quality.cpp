#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ompc/errors.h"
#include "ompc/eval.h"

namespace ompc {

OccupiedError
occupiedError(const Plane8& orig, const Plane8& recon, const Mask& mask)
{
  if (!orig.sameSize(recon) || !orig.sameSize(mask))
    throw DomainError("plane sizes differ");
  OccupiedError e;
  for (size_t i = 0; i < orig.size(); i++) {
    if (!mask.data()[i])
      continue;
    const double d = double(orig.data()[i]) - double(recon.data()[i]);
    e.sse += d * d;
    e.count++;
  }
  return e;
}

double
psnrFromError(const OccupiedError& e)
{
  if (e.count == 0)
    throw DomainError("no occupied pixels");
  if (e.sse == 0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / (e.sse / double(e.count)));
}

double
psnrOccupied(const Plane8& orig, const Plane8& recon, const Mask& mask)
{
  return psnrFromError(occupiedError(orig, recon, mask));
}

//============================================================================

namespace {

  struct CubicFit {
    Eigen::Vector4d coef;  // in the normalized variable t = (q - center) / scale
    double center = 0;
    double scale = 1;

    // Antiderivative in q.
    double integral(double q) const
    {
      const double t = (q - center) / scale;
      return scale * (coef[0] * t + coef[1] * t * t / 2 + coef[2] * t * t * t / 3
                      + coef[3] * t * t * t * t / 4);
    }
  };

  CubicFit fitLogRate(const RdCurve& curve)
  {
    double lo = curve.front().quality, hi = lo;
    for (const RdPoint& p : curve) {
      lo = std::min(lo, p.quality);
      hi = std::max(hi, p.quality);
    }
    CubicFit fit;
    fit.center = (lo + hi) / 2;
    fit.scale = hi > lo ? (hi - lo) / 2 : 1.0;

    Eigen::MatrixXd a(curve.size(), 4);
    Eigen::VectorXd y(curve.size());
    for (size_t i = 0; i < curve.size(); i++) {
      const double t = (curve[i].quality - fit.center) / fit.scale;
      a.row(Eigen::Index(i)) << 1.0, t, t * t, t * t * t;
      y[Eigen::Index(i)] = std::log10(curve[i].bits);
    }
    fit.coef = a.colPivHouseholderQr().solve(y);
    return fit;
  }

  void checkCurve(RdCurve& c)
  {
    if (c.size() < 4)
      throw DomainError("BD-rate needs at least 4 points per curve");
    std::sort(c.begin(), c.end(), [](const RdPoint& a, const RdPoint& b) { return a.bits < b.bits; });
    for (size_t i = 0; i < c.size(); i++) {
      if (!(c[i].bits > 0) || !std::isfinite(c[i].quality) || !std::isfinite(c[i].bits))
        throw DomainError("BD-rate needs positive rates and finite qualities");
      if (i && !(c[i].bits > c[i - 1].bits))
        throw DomainError("BD-rate needs strictly increasing rates");
    }
  }

}  // namespace

double
bdRate(RdCurve anchor, RdCurve test)
{
  checkCurve(anchor);
  checkCurve(test);
  auto range = [](const RdCurve& c) {
    double lo = c[0].quality, hi = lo;
    for (const RdPoint& p : c) {
      lo = std::min(lo, p.quality);
      hi = std::max(hi, p.quality);
    }
    return std::pair{lo, hi};
  };
  const auto [aLo, aHi] = range(anchor);
  const auto [tLo, tHi] = range(test);
  const double lo = std::max(aLo, tLo), hi = std::min(aHi, tHi);
  if (!(hi > lo))
    throw DomainError("R-D curves do not overlap in quality");

  const CubicFit fa = fitLogRate(anchor), ft = fitLogRate(test);
  const double meanA = (fa.integral(hi) - fa.integral(lo)) / (hi - lo);
  const double meanT = (ft.integral(hi) - ft.integral(lo)) / (hi - lo);
  return (std::pow(10.0, meanT - meanA) - 1.0) * 100.0;
}

}  // namespace ompc
