#pragma once

namespace vcp::sdt {

/// Standard normal CDF, computed through erfc for tail accuracy.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Z(p): standard normal quantile for p in (0, 1).
///
/// Acklam's rational approximation (relative error ~1.15e-9) followed by
/// Newton steps against normal_cdf, evaluated in the lower tail so that
/// |normal_cdf(Z(p)) - p| <= 1e-12. Throws DomainError outside (0, 1).
double inverse_normal_cdf(double p);

}  // namespace vcp::sdt
