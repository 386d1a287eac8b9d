#include "evac/statevector.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "evac/error.hpp"

namespace evac::qsim {

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw ArgumentError("qubit count must lie in [1, 16]");
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw ArgumentError("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    const auto n = amplitudes.size();
    if (n < 2 || (n & (n - 1)) != 0) {
        throw ArgumentError("amplitude count must be a power of two");
    }
    StateVector s(static_cast<std::size_t>(std::countr_zero(n)));
    s.amps_ = std::move(amplitudes);
    return s;
}

StateVector StateVector::tensor(const StateVector &leading, const StateVector &trailing) {
    StateVector s(leading.n_qubits_ + trailing.n_qubits_);
    const auto tdim = trailing.dim();
    for (std::size_t i = 0; i < leading.dim(); ++i) {
        for (std::size_t j = 0; j < tdim; ++j) {
            s.amps_[i * tdim + j] = leading.amps_[i] * trailing.amps_[j];
        }
    }
    return s;
}

std::size_t StateVector::mask(std::size_t q) const {
    if (q >= n_qubits_) {
        throw ArgumentError("qubit " + std::to_string(q) + " out of range");
    }
    return std::size_t{1} << (n_qubits_ - 1 - q);
}

void StateVector::apply_matrix(std::size_t q, const Amplitude (&m)[4]) {
    const auto bit = mask(q);
    const auto n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Amplitude a0 = amps_[i];
            const Amplitude a1 = amps_[i + bit];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i + bit] = m[2] * a0 + m[3] * a1;
        }
    }
}

void StateVector::apply_rx(std::size_t q, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const auto bit = mask(q);
    const auto n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Amplitude a0 = amps_[i];
            const Amplitude a1 = amps_[i + bit];
            // -i s a = (s a.imag, -s a.real)
            amps_[i] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
            amps_[i + bit] = {s * a0.imag() + c * a1.real(), -s * a0.real() + c * a1.imag()};
        }
    }
}

void StateVector::apply_ry(std::size_t q, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const auto bit = mask(q);
    const auto n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Amplitude a0 = amps_[i];
            const Amplitude a1 = amps_[i + bit];
            amps_[i] = c * a0 - s * a1;
            amps_[i + bit] = s * a0 + c * a1;
        }
    }
}

void StateVector::apply_rz(std::size_t q, double theta) {
    const Amplitude lo = std::polar(1.0, -0.5 * theta);
    const Amplitude hi = std::polar(1.0, 0.5 * theta);
    const auto bit = mask(q);
    const auto n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            amps_[i] *= lo;
            amps_[i + bit] *= hi;
        }
    }
}

void StateVector::apply_h(std::size_t q) {
    const double r = 1.0 / std::sqrt(2.0);
    const Amplitude m[4] = {r, r, r, -r};
    apply_matrix(q, m);
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ");
    }
    const auto cbit = mask(control);
    const auto tbit = mask(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

void StateVector::apply_global_phase(double phi) {
    const Amplitude p = std::polar(1.0, phi);
    for (auto &a : amps_) {
        a *= p;
    }
}

double StateVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return s;
}

double StateVector::expectation_z(std::size_t q) const {
    const auto bit = mask(q);
    double e = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        e += (i & bit) ? -std::norm(amps_[i]) : std::norm(amps_[i]);
    }
    return e;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        p[i] = std::norm(amps_[i]);
    }
    return p;
}

} // namespace evac::qsim

namespace evac::qsim {

std::vector<std::size_t> sample_counts(const StateVector &state, std::size_t shots, std::mt19937_64 &rng) {
    const auto p = state.probabilities();
    std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
    std::vector<std::size_t> counts(p.size(), 0);
    for (std::size_t s = 0; s < shots; ++s) {
        ++counts[dist(rng)];
    }
    return counts;
}

double sampled_expectation_z(std::span<const std::size_t> counts, std::size_t n_qubits, std::size_t q) {
    if (q >= n_qubits || counts.size() != (std::size_t{1} << n_qubits)) {
        throw ArgumentError("counts do not match the register");
    }
    const auto bit = std::size_t{1} << (n_qubits - 1 - q);
    double total = 0.0, signed_sum = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = static_cast<double>(counts[i]);
        total += c;
        signed_sum += (i & bit) ? -c : c;
    }
    if (total == 0.0) {
        throw ArgumentError("no shots recorded");
    }
    return signed_sum / total;
}

} // namespace evac::qsim
