#pragma once

namespace dualgrad {

/// Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1) for
/// 0 < alpha <= 1 and real z. Callers only need z <= 0 and small positive z;
/// on that range the absolute accuracy is ~1e-10 or better. For z <= 0 the
/// value lies in (0, 1]. Throws std::domain_error for alpha outside (0, 1].
double mittag_leffler(double alpha, double z);

}  // namespace dualgrad
