#pragma once

#include <ostream>
#include <span>

#include "dce/bogoliubov.hpp"

namespace dce {

/// Restores the stream precision on scope exit.
class PrecisionGuard {
public:
    explicit PrecisionGuard(std::ostream& os, std::streamsize digits = 17)
        : os_(os), old_(os.precision(digits))
    {
    }
    ~PrecisionGuard() { os_.precision(old_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    std::ostream& os_;
    std::streamsize old_;
};

/// Columns n,omega_over_pi_L0,N_n; the second column is the mode frequency
/// in units of pi, n / L0. A trailing comment row records the truncation.
inline void write_spectrum_csv(std::ostream& os, const SpectrumResult& res)
{
    PrecisionGuard guard(os);
    const double L0 = res.law.static_length();
    os << "n,omega_over_pi_L0,N_n\n";
    for (int n = 1; n <= res.n_max; ++n)
        os << n << ',' << n / L0 << ',' << res.occupation(n) << '\n';
    os << "# n_max=" << res.n_max << " s_max=" << res.s_max << " nodes=" << res.nodes
       << " unitarity_defect=" << res.unitarity_defect
       << " converged=" << (res.convergence.converged ? "true" : "false") << '\n';
}

/// Columns r,s,re_alpha,im_alpha,re_beta,im_beta.
inline void write_coefficient_csv(std::ostream& os, std::span<const BogoliubovRow> rows)
{
    PrecisionGuard guard(os);
    os << "r,s,re_alpha,im_alpha,re_beta,im_beta\n";
    for (const auto& row : rows)
        for (int s = 1; s <= row.s_max(); ++s) {
            const complex a = row.alphas[s - 1];
            const complex b = row.betas[s - 1];
            os << row.out_mode << ',' << s << ',' << a.real() << ',' << a.imag() << ','
               << b.real() << ',' << b.imag() << '\n';
        }
}

} // namespace dce
