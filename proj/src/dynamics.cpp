#include "plexq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "plexq/constants.hpp"
#include "plexq/errors.hpp"

#if defined(__SSE__) || defined(__x86_64__)
#include <xmmintrin.h>
#define PLEXQ_HAVE_MXCSR 1
#endif

namespace plexq {

namespace {

// Amplitudes far from the excitation decay into the subnormal range, where
// arithmetic is ~100x slower. Flush them to zero for the duration of a run.
class FlushDenormals {
public:
#ifdef PLEXQ_HAVE_MXCSR
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#endif
};

std::size_t step_count(const PropagationOptions& opt) {
    if (!(opt.dt > 0.0)) throw std::invalid_argument("propagation: dt must be > 0");
    if (!(opt.t_end > opt.t_start)) throw std::invalid_argument("propagation: t_end must exceed t_start");
    if (opt.record.stride == 0) throw std::invalid_argument("propagation: record stride must be >= 1");
    return static_cast<std::size_t>(std::llround((opt.t_end - opt.t_start) / opt.dt));
}

void check_basis(const ParameterSet& params, const BasisDescriptor& basis, const BasisDescriptor& state_basis) {
    check_consistent(params, basis);
    if (!(basis == state_basis)) throw std::invalid_argument("propagation: state basis differs from model basis");
}

}  // namespace

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, const OperatorMatrix& H,
                              const std::vector<OperatorMatrix>& collapse) {
    const auto n = rho.rows();
    if (rho.cols() != n || H.m.rows() != n || H.m.cols() != n) {
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    }
    const cd minus_i_over_hbar(0.0, -1.0 / constants::hbar);
    Eigen::MatrixXcd out = minus_i_over_hbar * (H.m * rho - rho * H.m);
    for (const auto& c : collapse) {
        if (c.m.rows() != n || c.m.cols() != n) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
        const Eigen::MatrixXcd cdc = c.m.adjoint() * c.m;
        out += c.m * rho * c.m.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

// ---------------------------------------------------------------------------

PictureOperator::PictureOperator(const Eigen::MatrixXcd& fixed, const Eigen::VectorXd& energies)
    : PictureOperator(fixed, Eigen::MatrixXcd::Zero(fixed.rows(), fixed.cols()), energies) {}

PictureOperator::PictureOperator(const Eigen::MatrixXcd& fixed, const Eigen::MatrixXcd& per_field,
                                 const Eigen::VectorXd& energies) {
    if (fixed.rows() != energies.size() || fixed.cols() != energies.size() ||
        per_field.rows() != fixed.rows() || per_field.cols() != fixed.cols()) {
        throw std::invalid_argument("PictureOperator: dimension mismatch");
    }
    // column-major order keeps the writes of multiply() local
    for (Eigen::Index c = 0; c < fixed.cols(); ++c) {
        for (Eigen::Index r = 0; r < fixed.rows(); ++r) {
            if (fixed(r, c) == cd(0.0) && per_field(r, c) == cd(0.0)) continue;
            const double w = (energies(r) - energies(c)) / constants::hbar;
            std::size_t f = 0;
            while (f < frequencies_.size() && std::abs(frequencies_[f] - w) > 1e-12 * (1.0 + std::abs(w))) ++f;
            if (f == frequencies_.size()) {
                // keep conjugate groups exact negatives of each other
                double rep = w;
                for (double existing : frequencies_) {
                    if (std::abs(existing + w) <= 1e-12 * (1.0 + std::abs(w))) rep = -existing;
                }
                frequencies_.push_back(rep);
            }
            rows_.push_back(r);
            cols_.push_back(c);
            fixed_.push_back(fixed(r, c));
            per_field_.push_back(per_field(r, c));
            freq_.push_back(f);
        }
    }
    phasors_.resize(frequencies_.size());
}

void PictureOperator::evaluate(double e, double t, std::vector<cd>& values) const {
    for (std::size_t f = 0; f < frequencies_.size(); ++f) {
        phasors_[f] = frequencies_[f] == 0.0 ? cd(1.0) : std::polar(1.0, frequencies_[f] * t);
    }
    values.resize(rows_.size());
    if (e == 0.0) {
        for (std::size_t k = 0; k < rows_.size(); ++k) values[k] = fixed_[k] * phasors_[freq_[k]];
    } else {
        for (std::size_t k = 0; k < rows_.size(); ++k) values[k] = (fixed_[k] + e * per_field_[k]) * phasors_[freq_[k]];
    }
}

void PictureOperator::multiply(const std::vector<cd>& values, const Eigen::MatrixXcd& x,
                               Eigen::MatrixXcd& out) const {
    out.setZero(x.rows(), x.cols());
    const Eigen::Index n = x.cols();
    const std::size_t nnz = rows_.size();
    for (Eigen::Index c = 0; c < n; ++c) {
        const cd* xc = x.col(c).data();
        cd* oc = out.col(c).data();
        for (std::size_t k = 0; k < nnz; ++k) oc[rows_[k]] += values[k] * xc[cols_[k]];
    }
}

void PictureOperator::multiply(const std::vector<cd>& values, const Eigen::VectorXcd& x,
                               Eigen::VectorXcd& out) const {
    out.setZero(x.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) out[rows_[k]] += values[k] * x[cols_[k]];
}

void PictureOperator::add_times_adjoint(const std::vector<cd>& values, const Eigen::MatrixXcd& x,
                                        Eigen::MatrixXcd& out) const {
    // (x M^+)(:, r) += conj(M(r, c)) x(:, c)
    const Eigen::Index n = x.rows();
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        const cd v = std::conj(values[k]);
        const cd* xc = x.col(cols_[k]).data();
        cd* oc = out.col(rows_[k]).data();
        for (Eigen::Index i = 0; i < n; ++i) oc[i] += v * xc[i];
    }
}

cd PictureOperator::trace_product(const std::vector<cd>& values, const Eigen::MatrixXcd& rho) const {
    cd sum = 0.0;
    for (std::size_t k = 0; k < rows_.size(); ++k) sum += values[k] * rho(cols_[k], rows_[k]);
    return sum;
}

cd PictureOperator::expectation(const std::vector<cd>& values, const Eigen::VectorXcd& x) const {
    cd sum = 0.0;
    for (std::size_t k = 0; k < rows_.size(); ++k) sum += std::conj(x[rows_[k]]) * values[k] * x[cols_[k]];
    return sum;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd bare_energies(const ParameterSet& params, const BasisDescriptor& basis) {
    return bare_hamiltonian(params, basis).m.diagonal().real();
}

Eigen::MatrixXcd to_lab_frame(const Eigen::MatrixXcd& rho_I, const Eigen::VectorXd& energies, double t) {
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(energies.size());
    const Eigen::VectorXcd u = to_lab_frame(ones, energies, t);
    return u.asDiagonal() * rho_I * u.conjugate().asDiagonal();
}

Eigen::MatrixXcd to_interaction_picture(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies, double t) {
    return to_lab_frame(rho, energies, -t);
}

Eigen::VectorXcd to_lab_frame(const Eigen::VectorXcd& phi, const Eigen::VectorXd& energies, double t) {
    Eigen::VectorXcd out(phi.size());
    for (Eigen::Index k = 0; k < phi.size(); ++k) {
        const double a = energies(k) * t / constants::hbar;
        out(k) = a == 0.0 ? phi(k) : phi(k) * std::polar(1.0, -a);
    }
    return out;
}

Eigen::VectorXcd to_interaction_picture(const Eigen::VectorXcd& psi, const Eigen::VectorXd& energies, double t) {
    return to_lab_frame(psi, energies, -t);
}

// ---------------------------------------------------------------------------

LindbladGenerator::LindbladGenerator(const ParameterSet& params, const BasisDescriptor& basis,
                                     const DriveSpec& drive)
    : drive_(drive), energies_(bare_energies(params, basis)) {
    drive_.validate();
    const auto collapse = build_collapse_operators(params, basis);
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd h = bare_hamiltonian(params, basis).m;
    h.diagonal().setZero();
    Eigen::MatrixXcd k0 = cd(0.0, -1.0 / constants::hbar) * h;
    for (const auto& c : collapse) {
        k0 -= 0.5 * (c.m.adjoint() * c.m);
        // jump phases cancel only if every entry carries the same Bohr frequency
        PictureOperator jump(c.m, energies_);
        if (jump.nonzeros() == 0) continue;
        if (jump.frequency_count() != 1) throw std::logic_error("collapse operator is not an energy ladder operator");
        std::vector<cd> values;
        jump.evaluate(0.0, 0.0, values);
        // C/sqrt(2): half of C rho C^+ goes into A, the other half comes from A^+
        for (auto& v : values) v *= std::sqrt(0.5);
        jump_values_.push_back(std::move(values));
        jumps_.push_back(std::move(jump));
    }
    generator_ = PictureOperator(
        k0, cd(0.0, constants::debye_au_to_eV / constants::hbar) * dipole_operator(params, basis).m, energies_);
    scratch_.resize(n, n);
}

double LindbladGenerator::field(double t) const {
    return drive_.active() ? field_at(drive_, t) : 0.0;
}

void LindbladGenerator::apply(double t, const Eigen::MatrixXcd& rho_I, Eigen::MatrixXcd& out) const {
    generator_.evaluate(field(t), t, values_);
    generator_.multiply(values_, rho_I, out);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        jumps_[k].multiply(jump_values_[k], rho_I, scratch_);
        jumps_[k].add_times_adjoint(jump_values_[k], scratch_, out);
    }
    // exactly Hermitian, so rho_I never picks up an anti-Hermitian part
    scratch_ = out.adjoint();
    out += scratch_;
}

EffectiveSchrodinger::EffectiveSchrodinger(const ParameterSet& params, const BasisDescriptor& basis,
                                           const DriveSpec& drive)
    : drive_(drive), energies_(bare_energies(params, basis)) {
    drive_.validate();
    Eigen::MatrixXcd hc = build_effective_hamiltonian(params, basis, drive, 0.0, false).m;
    hc.diagonal() -= energies_.cast<cd>();
    generator_ = PictureOperator(
        cd(0.0, -1.0 / constants::hbar) * hc,
        cd(0.0, constants::debye_au_to_eV / constants::hbar) * dipole_operator(params, basis).m, energies_);
}

double EffectiveSchrodinger::field(double t) const {
    return drive_.active() ? field_at(drive_, t) : 0.0;
}

void EffectiveSchrodinger::apply(double t, const Eigen::VectorXcd& phi, Eigen::VectorXcd& out) const {
    generator_.evaluate(field(t), t, values_);
    generator_.multiply(values_, phi, out);
}

// ---------------------------------------------------------------------------

ObservableSet::ObservableSet(const ParameterSet& params, const BasisDescriptor& basis)
    : basis_(basis), dipole_(dipole_operator(params, basis).m, bare_energies(params, basis)) {}

void ObservableSet::record(Trajectory& traj, double t, const Eigen::MatrixXcd& rho_I) const {
    traj.time.push_back(t);
    std::vector<double> pops(basis_.n_dots(), 0.0);
    double plasmon = 0.0;
    double trace = 0.0;
    for (std::size_t k = 0; k < basis_.dim(); ++k) {
        const double p = rho_I(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
        trace += p;
        plasmon += static_cast<double>(basis_.plasmon_number(k)) * p;
        for (std::size_t j = 1; j <= basis_.n_dots(); ++j) {
            if (basis_.dot_occupation(k, j)) pops[j - 1] += p;
        }
    }
    for (std::size_t j = 0; j < pops.size(); ++j) traj.dot_population[j].push_back(pops[j]);
    traj.plasmon_population.push_back(plasmon);
    dipole_.evaluate(0.0, t, values_);
    traj.dipole.push_back(dipole_.trace_product(values_, rho_I).real());
    traj.norm_or_trace.push_back(trace);
}

void ObservableSet::record(Trajectory& traj, double t, const Eigen::VectorXcd& phi) const {
    traj.time.push_back(t);
    std::vector<double> pops(basis_.n_dots(), 0.0);
    double plasmon = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < basis_.dim(); ++k) {
        const double p = std::norm(phi(static_cast<Eigen::Index>(k)));
        norm += p;
        plasmon += static_cast<double>(basis_.plasmon_number(k)) * p;
        for (std::size_t j = 1; j <= basis_.n_dots(); ++j) {
            if (basis_.dot_occupation(k, j)) pops[j - 1] += p;
        }
    }
    for (std::size_t j = 0; j < pops.size(); ++j) traj.dot_population[j].push_back(pops[j]);
    traj.plasmon_population.push_back(plasmon);
    dipole_.evaluate(0.0, t, values_);
    traj.dipole.push_back(dipole_.expectation(values_, phi).real());
    traj.norm_or_trace.push_back(norm);
}

// ---------------------------------------------------------------------------

Trajectory propagate_lindblad(const DensityMatrix& rho0, const ParameterSet& params,
                              const BasisDescriptor& basis, const DriveSpec& drive,
                              const PropagationOptions& options) {
    check_basis(params, basis, rho0.basis);
    const std::size_t steps = step_count(options);
    const FlushDenormals ftz;
    const LindbladGenerator gen(params, basis, drive);
    const ObservableSet obs(params, basis);
    const Eigen::VectorXd& energies = gen.energies();

    Trajectory traj;
    traj.solver = Solver::lindblad;
    traj.reserve(basis.n_dots(), steps / options.record.stride + 1);

    const double trace0 = rho0.trace();
    const auto n = static_cast<Eigen::Index>(basis.dim());
    const double dt = options.dt;
    Eigen::MatrixXcd rho = to_interaction_picture(rho0.rho, energies, options.t_start);
    Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    std::size_t n_records = 0;

    auto record = [&](std::size_t step) {
        const double t = options.t_start + static_cast<double>(step) * dt;
        // populations, trace and spectrum are frame independent
        const DensityMatrix picture{rho, basis};
        const double trace_err = std::abs(picture.trace() - trace0);
        const double herm = picture.hermiticity_error();
        const double min_eig = picture.min_eigenvalue();
        auto& d = traj.diagnostics;
        d.max_trace_error = std::max(d.max_trace_error, trace_err);
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, herm);
        d.min_eigenvalue = std::min(d.min_eigenvalue, min_eig);
        if (!(trace_err <= kTraceDriftLimit)) throw PropagationError("Lindblad trace drift", t);
        if (!(min_eig >= kNegativityLimit)) throw PropagationError("Lindblad density matrix lost positivity", t);
        obs.record(traj, t, rho);
        if (options.record.keep_states && n_records % std::max<std::size_t>(options.record.state_stride, 1) == 0) {
            traj.snapshots.push_back({t, DensityMatrix{to_lab_frame(rho, energies, t), basis}});
        }
        ++n_records;
    };

    record(0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = options.t_start + static_cast<double>(step) * dt;
        gen.apply(t, rho, k1);
        tmp = rho + (0.5 * dt) * k1;
        gen.apply(t + 0.5 * dt, tmp, k2);
        tmp = rho + (0.5 * dt) * k2;
        gen.apply(t + 0.5 * dt, tmp, k3);
        tmp = rho + dt * k3;
        gen.apply(t + dt, tmp, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((step + 1) % options.record.stride == 0) record(step + 1);
    }
    const double t_final = options.t_start + static_cast<double>(steps) * dt;
    traj.final_state = {t_final, DensityMatrix{to_lab_frame(rho, energies, t_final), basis}};
    return traj;
}

Trajectory propagate_nonhermitian(const WavePacket& psi0, const ParameterSet& params,
                                  const BasisDescriptor& basis, const DriveSpec& drive,
                                  const PropagationOptions& options) {
    check_basis(params, basis, psi0.basis);
    const std::size_t steps = step_count(options);
    const FlushDenormals ftz;
    const EffectiveSchrodinger gen(params, basis, drive);
    const ObservableSet obs(params, basis);
    const Eigen::VectorXd& energies = gen.energies();

    Trajectory traj;
    traj.solver = Solver::nonhermitian;
    traj.reserve(basis.n_dots(), steps / options.record.stride + 1);

    const double norm0 = psi0.norm_squared();
    const auto n = static_cast<Eigen::Index>(basis.dim());
    const double dt = options.dt;
    Eigen::VectorXcd phi = to_interaction_picture(psi0.psi, energies, options.t_start);
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::size_t n_records = 0;

    auto record = [&](std::size_t step) {
        const double t = options.t_start + static_cast<double>(step) * dt;
        if (phi.squaredNorm() > norm0 * (1.0 + kNormGrowthLimit)) {
            throw PropagationError("wave packet norm grew (integrator instability)", t);
        }
        obs.record(traj, t, phi);
        if (options.record.keep_states && n_records % std::max<std::size_t>(options.record.state_stride, 1) == 0) {
            traj.snapshots.push_back({t, WavePacket{to_lab_frame(phi, energies, t), basis}});
        }
        ++n_records;
    };

    record(0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = options.t_start + static_cast<double>(step) * dt;
        gen.apply(t, phi, k1);
        tmp = phi + (0.5 * dt) * k1;
        gen.apply(t + 0.5 * dt, tmp, k2);
        tmp = phi + (0.5 * dt) * k2;
        gen.apply(t + 0.5 * dt, tmp, k3);
        tmp = phi + dt * k3;
        gen.apply(t + dt, tmp, k4);
        phi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((step + 1) % options.record.stride == 0) record(step + 1);
    }
    const double t_final = options.t_start + static_cast<double>(steps) * dt;
    traj.final_state = {t_final, WavePacket{to_lab_frame(phi, energies, t_final), basis}};
    return traj;
}

Trajectory propagate(const QuantumState& start, const ParameterSet& params, const BasisDescriptor& basis,
                     Solver solver, const DriveSpec& drive, const PropagationOptions& options) {
    if (solver == Solver::lindblad) {
        if (const auto* wp = std::get_if<WavePacket>(&start)) {
            return propagate_lindblad(pure_density_matrix(*wp), params, basis, drive, options);
        }
        return propagate_lindblad(std::get<DensityMatrix>(start), params, basis, drive, options);
    }
    const auto* wp = std::get_if<WavePacket>(&start);
    if (!wp) throw std::invalid_argument("propagate: the non-Hermitian backend needs a wave packet");
    return propagate_nonhermitian(*wp, params, basis, drive, options);
}

// ---------------------------------------------------------------------------

namespace {

// Record indices e whose trailing window [max(0, e - w), e] violates the tolerance.
void mark_unsteady(const std::vector<double>& col, std::size_t w, double tol, std::vector<char>& bad) {
    std::deque<std::size_t> maxq, minq;
    double sum = 0.0;
    for (std::size_t e = 0; e < col.size(); ++e) {
        while (!maxq.empty() && col[maxq.back()] <= col[e]) maxq.pop_back();
        maxq.push_back(e);
        while (!minq.empty() && col[minq.back()] >= col[e]) minq.pop_back();
        minq.push_back(e);
        sum += col[e];
        const std::size_t first = e >= w ? e - w : 0;
        if (e >= w + 1) sum -= col[e - w - 1];
        while (maxq.front() < first) maxq.pop_front();
        while (minq.front() < first) minq.pop_front();
        const double hi = col[maxq.front()];
        const double lo = col[minq.front()];
        const double mean = sum / static_cast<double>(e - first + 1);
        const bool zero = hi == 0.0 && lo == 0.0;
        if (!zero && !(hi - lo < tol * std::abs(mean))) bad[e] = 1;
    }
}

// Trailing moving average over m records.
std::vector<double> trailing_average(const std::vector<double>& col, std::size_t m) {
    if (m <= 1) return col;
    std::vector<double> out(col.size());
    double sum = 0.0;
    for (std::size_t e = 0; e < col.size(); ++e) {
        sum += col[e];
        if (e >= m) sum -= col[e - m];
        out[e] = sum / static_cast<double>(std::min(e + 1, m));
    }
    return out;
}

}  // namespace

std::optional<double> detect_steady_state(const Trajectory& traj, double window, double tol,
                                          const SteadyStateOptions& options) {
    if (traj.size() < 2) return std::nullopt;
    if (!(window > 0.0) || !(tol > 0.0) || !(options.smoothing >= 0.0)) {
        throw std::invalid_argument("detect_steady_state: window and tol must be > 0, smoothing >= 0");
    }
    const double dt = traj.time[1] - traj.time[0];
    const auto w = static_cast<std::size_t>(std::llround(window / dt));
    const auto m = static_cast<std::size_t>(std::llround(options.smoothing / dt));
    if (w == 0) return std::nullopt;

    std::vector<char> bad(traj.size(), 0);
    auto check = [&](const std::vector<double>& col) { mark_unsteady(trailing_average(col, m), w, tol, bad); };
    if (options.populations) {
        for (const auto& col : traj.dot_population) check(col);
        check(traj.plasmon_population);
    }
    if (options.dipole) check(traj.dipole);
    if (options.norm) check(traj.norm_or_trace);

    std::size_t first = bad.size();
    while (first > 0 && !bad[first - 1]) --first;
    if (first == bad.size()) return std::nullopt;
    return traj.time[first];
}

}  // namespace plexq
