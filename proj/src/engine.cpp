#include "qcaforge/engine.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qcaforge
{

namespace
{

constexpr double elementary_charge = 1.602176634e-19;   // C
constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

}  // namespace

void sim_config::validate() const
{
    const auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(epsilon_r > 0.0))
    {
        fail("epsilon_r must be positive");
    }
    if (!(gamma_low > 0.0) || !(gamma_low < gamma_high))
    {
        fail("gamma bounds must satisfy 0 < gamma_low < gamma_high");
    }
    if (!(convergence_tolerance > 0.0))
    {
        fail("convergence tolerance must be positive");
    }
    if (max_iterations_per_sample < 1)
    {
        fail("max iterations per sample must be at least 1");
    }
    if (!(relaxation_factor > 0.0) || relaxation_factor > 1.0)
    {
        fail("relaxation factor must lie in (0, 1]");
    }
    if (samples_per_cycle < 8 || samples_per_cycle % 4 != 0)
    {
        fail("samples per cycle must be at least 8 and divisible by 4");
    }
    if (!(radius_of_effect >= static_cast<double>(grid_pitch_nm)))
    {
        fail("radius of effect must be at least the grid pitch (20 nm)");
    }
    if (!(cell_size > 0.0) || !(dot_offset > 0.0) || !(2.0 * dot_offset < cell_size))
    {
        fail("dot offset must be positive and keep the dots inside the cell");
    }
}

// ---------------------------------------------------------------------------------------------------------
// clock

clock_schedule::clock_schedule(const sim_config& cfg) :
        samples_per_cycle_{cfg.samples_per_cycle},
        gamma_low_{cfg.gamma_low},
        gamma_high_{cfg.gamma_high}
{
    cfg.validate();
}

double clock_schedule::gamma(int zone, long long sample) const noexcept
{
    const long long period = samples_per_cycle_;
    const long long quarter = period / 4;
    long long local = (sample - static_cast<long long>(zone) * quarter) % period;
    if (local < 0)
    {
        local += period;
    }
    const auto phase = local / quarter;
    const double t = static_cast<double>(local % quarter) / static_cast<double>(quarter);
    const double span = gamma_high_ - gamma_low_;
    switch (phase)
    {
        case 0: return gamma_high_ - span * t;  // switch
        case 1: return gamma_low_;              // hold
        case 2: return gamma_low_ + span * t;   // release
        default: return gamma_high_;            // relax
    }
}

std::array<double, clock_zone_count> clock_schedule::gammas(long long sample) const noexcept
{
    std::array<double, clock_zone_count> g{};
    for (int z = 0; z < clock_zone_count; ++z)
    {
        g[static_cast<std::size_t>(z)] = gamma(z, sample);
    }
    return g;
}

double clock_gamma(int zone, long long sample, const clock_schedule& schedule)
{
    return schedule.gamma(zone, sample);
}

// ---------------------------------------------------------------------------------------------------------
// electrostatics

namespace
{

struct dot_charges
{
    std::array<double, 4> q;
};

// Dots 0 and 1 form the diagonal occupied at P = +1, dots 2 and 3 the one occupied at P = -1. Every dot carries
// a +e/2 neutralising background charge.
constexpr std::array<std::array<double, 2>, 4> dot_directions{{{1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}}};

dot_charges charges_for(int polarization_sign) noexcept
{
    dot_charges c{{0.5, 0.5, 0.5, 0.5}};
    if (polarization_sign > 0)
    {
        c.q[0] -= 1.0;
        c.q[1] -= 1.0;
    }
    else
    {
        c.q[2] -= 1.0;
        c.q[3] -= 1.0;
    }
    for (auto& q : c.q)
    {
        q *= elementary_charge;
    }
    return c;
}

// Accumulated in extended precision: the kink energy is a small difference of two such sums.
long double coulomb_sum(double dx_nm, double dy_nm, const dot_charges& a, const dot_charges& b, double dot_offset_nm,
                        double epsilon_r) noexcept
{
    const long double k = 1.0L / (4.0L * std::numbers::pi_v<long double> * vacuum_permittivity * epsilon_r);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < 4; ++i)
    {
        for (std::size_t j = 0; j < 4; ++j)
        {
            const long double rx = (dx_nm + dot_offset_nm * (dot_directions[j][0] - dot_directions[i][0])) * 1e-9L;
            const long double ry = (dy_nm + dot_offset_nm * (dot_directions[j][1] - dot_directions[i][1])) * 1e-9L;
            sum += k * a.q[i] * b.q[j] / std::hypot(rx, ry);
        }
    }
    return sum;
}

}  // namespace

double kink_energy(const cell& a, const cell& b, const sim_config& cfg)
{
    if (a.x_nm == b.x_nm && a.y_nm == b.y_nm)
    {
        throw simulation_error("kink energy undefined for coincident cells");
    }
    const auto dx = static_cast<double>(b.x_nm - a.x_nm);
    const auto dy = static_cast<double>(b.y_nm - a.y_nm);
    const auto plus = charges_for(+1);
    const auto minus = charges_for(-1);
    const long double same = coulomb_sum(dx, dy, plus, plus, cfg.dot_offset, cfg.epsilon_r);
    const long double opposite = coulomb_sum(dx, dy, plus, minus, cfg.dot_offset, cfg.epsilon_r);
    return static_cast<double>(opposite - same);
}

double response(double activation) noexcept
{
    return activation / std::sqrt(1.0 + activation * activation);
}

coupling_table::coupling_table(const layout& lyt, const sim_config& cfg)
{
    const auto n = lyt.cells.size();
    offsets_.reserve(n + 1);
    offsets_.push_back(0);
    const double r2 = cfg.radius_of_effect * cfg.radius_of_effect;
    // Kink energy depends only on the displacement, so cache by offset.
    std::map<std::pair<std::int64_t, std::int64_t>, double> cache{};
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto& ci = lyt.cells[i];
        for (std::size_t j = 0; j < n; ++j)
        {
            if (i == j)
            {
                continue;
            }
            const auto& cj = lyt.cells[j];
            const auto dx = cj.x_nm - ci.x_nm;
            const auto dy = cj.y_nm - ci.y_nm;
            if (static_cast<double>(dx * dx + dy * dy) > r2)
            {
                continue;
            }
            const auto key = std::make_pair(dx, dy);
            auto it = cache.find(key);
            if (it == cache.end())
            {
                it = cache.emplace(key, kink_energy(ci, cj, cfg)).first;
            }
            entries_.push_back({j, it->second});
        }
        offsets_.push_back(entries_.size());
    }
}

// ---------------------------------------------------------------------------------------------------------
// relaxation

namespace
{

/// Persistent workers that split each Jacobi sweep into contiguous chunks.
class sweep_pool
{
  public:
    explicit sweep_pool(unsigned threads) : threads_{std::max(1u, threads)}, sync_{static_cast<std::ptrdiff_t>(threads_)}
    {
        for (unsigned w = 1; w < threads_; ++w)
        {
            workers_.emplace_back([this, w] { worker_loop(w); });
        }
    }

    sweep_pool(const sweep_pool&) = delete;
    sweep_pool& operator=(const sweep_pool&) = delete;

    ~sweep_pool()
    {
        if (threads_ > 1)
        {
            stop_ = true;
            sync_.arrive_and_wait();
        }
        for (auto& t : workers_)
        {
            t.join();
        }
    }

    [[nodiscard]] unsigned size() const noexcept
    {
        return threads_;
    }

    /// Calls job(worker) on every worker, including the caller as worker 0, and waits for all of them.
    void run(const std::function<void(unsigned)>& job)
    {
        if (threads_ == 1)
        {
            job(0);
            return;
        }
        job_ = &job;
        sync_.arrive_and_wait();
        job(0);
        sync_.arrive_and_wait();
    }

  private:
    void worker_loop(unsigned id)
    {
        while (true)
        {
            sync_.arrive_and_wait();
            if (stop_)
            {
                return;
            }
            (*job_)(id);
            sync_.arrive_and_wait();
        }
    }

    unsigned threads_;
    std::barrier<> sync_;
    std::vector<std::thread> workers_{};
    const std::function<void(unsigned)>* job_{nullptr};
    bool stop_{false};
};

class relaxer
{
  public:
    relaxer(const layout& lyt, const sim_config& cfg, unsigned threads) :
            couplings_{lyt, cfg},
            cfg_{cfg},
            pool_{threads}
    {
        for (std::size_t i = 0; i < lyt.cells.size(); ++i)
        {
            zones_.push_back(static_cast<std::size_t>(lyt.cells[i].zone));
            if (lyt.cells[i].is_driven())
            {
                driven_.push_back(i);
            }
        }
        next_.resize(lyt.cells.size());
        chunk_delta_.resize(pool_.size());
    }

    /// Relaxes `state` in place; returns the number of sweeps and whether the tolerance was met.
    std::pair<int, bool> relax(std::vector<double>& state, const std::array<double, clock_zone_count>& gammas)
    {
        std::array<double, clock_zone_count> inv_two_gamma{};
        for (std::size_t z = 0; z < clock_zone_count; ++z)
        {
            inv_two_gamma[z] = 1.0 / (2.0 * gammas[z]);
        }
        const auto workers = pool_.size();
        const auto total = driven_.size();
        const double omega = cfg_.relaxation_factor;
        next_ = state;

        const std::function<void(unsigned)> sweep = [&](unsigned w)
        {
            const auto begin = total * w / workers;
            const auto end = total * (w + 1) / workers;
            double delta = 0.0;
            for (auto k = begin; k < end; ++k)
            {
                const auto i = driven_[k];
                double field = 0.0;
                for (const auto& e : couplings_.neighbours(i))
                {
                    field += e.energy * state[e.neighbour];
                }
                const double target = response(field * inv_two_gamma[zones_[i]]);
                const double p = omega == 1.0 ? target : state[i] + omega * (target - state[i]);
                delta = std::max(delta, std::abs(p - state[i]));
                next_[i] = p;
            }
            chunk_delta_[w] = delta;
        };

        for (int it = 1; it <= cfg_.max_iterations_per_sample; ++it)
        {
            pool_.run(sweep);
            const double delta = *std::max_element(chunk_delta_.begin(), chunk_delta_.end());
            std::swap(state, next_);
            if (delta < cfg_.convergence_tolerance)
            {
                return {it, true};
            }
        }
        return {cfg_.max_iterations_per_sample, false};
    }

  private:
    coupling_table couplings_;
    sim_config cfg_;
    sweep_pool pool_;
    std::vector<std::size_t> zones_{};
    std::vector<std::size_t> driven_{};
    std::vector<double> next_{};
    std::vector<double> chunk_delta_{};
};

std::vector<double> initial_state(const layout& lyt)
{
    std::vector<double> state(lyt.cells.size(), 0.0);
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        state[i] = lyt.cells[i].polarization;
    }
    return state;
}

void require_valid(const layout& lyt)
{
    const auto v = validate_layout(lyt);
    if (!v.ok())
    {
        throw simulation_error("invalid layout: " + v.violations.front());
    }
}

}  // namespace

relax_result relax_sample(const layout& lyt, const std::array<double, clock_zone_count>& gammas,
                          const sim_config& cfg, std::span<const double> seed)
{
    cfg.validate();
    if (seed.size() != lyt.cells.size())
    {
        throw simulation_error("seed size does not match the layout");
    }
    relaxer r{lyt, cfg, 1};
    relax_result res{};
    res.polarizations.assign(seed.begin(), seed.end());
    const auto [iterations, converged] = r.relax(res.polarizations, gammas);
    res.iterations = iterations;
    res.converged = converged;
    return res;
}

relax_result relax_sample(const layout& lyt, const std::array<double, clock_zone_count>& gammas,
                          const sim_config& cfg)
{
    const auto seed = initial_state(lyt);
    return relax_sample(lyt, gammas, cfg, seed);
}

// ---------------------------------------------------------------------------------------------------------
// trace

std::vector<std::size_t> trace::unconverged_samples() const
{
    std::vector<std::size_t> out{};
    for (std::size_t s = 0; s < converged_.size(); ++s)
    {
        if (converged_[s] == 0)
        {
            out.push_back(s);
        }
    }
    return out;
}

void trace::append(std::size_t vector, const std::array<double, clock_zone_count>& gammas,
                   std::span<const double> polarizations, bool converged)
{
    polarizations_.insert(polarizations_.end(), polarizations.begin(), polarizations.end());
    gammas_.push_back(gammas);
    vector_index_.push_back(vector);
    converged_.push_back(converged ? 1 : 0);
}

trace simulate(const layout& lyt, const std::vector<input_vector>& vectors, const sim_config& cfg, unsigned threads)
{
    cfg.validate();
    require_valid(lyt);

    std::vector<std::size_t> input_cells{};
    for (const auto& label : lyt.inputs)
    {
        input_cells.push_back(lyt.index_of(label));
    }
    for (std::size_t v = 0; v < vectors.size(); ++v)
    {
        for (const auto& label : lyt.inputs)
        {
            if (!vectors[v].contains(label))
            {
                throw simulation_error("vector " + std::to_string(v) + " is missing input '" + label + "'");
            }
        }
        for (const auto& [label, value] : vectors[v])
        {
            const auto idx = lyt.find_label(label);
            if (!idx || lyt.cells[*idx].kind != cell_kind::input)
            {
                throw simulation_error("vector " + std::to_string(v) + " assigns unknown input '" + label + "'");
            }
        }
    }

    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    trace tr{lyt.cells.size(), cfg.samples_per_cycle};
    if (vectors.empty())
    {
        return tr;
    }

    const clock_schedule schedule{cfg};
    relaxer r{lyt, cfg, threads};
    auto state = initial_state(lyt);
    for (auto& p : state)
    {
        p = std::clamp(p, -1.0, 1.0);
    }
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        if (lyt.cells[i].is_driven())
        {
            state[i] = 0.0;
        }
    }

    for (std::size_t v = 0; v < vectors.size(); ++v)
    {
        for (std::size_t k = 0; k < input_cells.size(); ++k)
        {
            state[input_cells[k]] = vectors[v].at(lyt.inputs[k]) ? 1.0 : -1.0;
        }
        for (int s = 0; s < cfg.samples_per_cycle; ++s)
        {
            const auto gammas = schedule.gammas(s);
            const auto [iterations, converged] = r.relax(state, gammas);
            tr.append(v, gammas, state, converged);
        }
    }
    return tr;
}

unsigned threads_from_environment()
{
    const char* env = std::getenv("QCAFORGE_THREADS");
    if (env == nullptr || *env == '\0')
    {
        return 0;
    }
    char* end = nullptr;
    const auto v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0')
    {
        throw std::invalid_argument(std::string("QCAFORGE_THREADS must be a non-negative integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
}

std::string cell_column_name(const layout& lyt, std::size_t cell)
{
    const auto& c = lyt.cells[cell];
    if (c.kind == cell_kind::input || c.kind == cell_kind::output)
    {
        return c.label;
    }
    return "cell" + std::to_string(cell);
}

namespace
{

std::string six_digits(double v)
{
    if (v == 0.0)
    {
        v = 0.0;  // no negative zero in output
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const trace& tr, const layout& lyt)
{
    if (tr.cell_count() != lyt.cells.size())
    {
        throw simulation_error("trace does not belong to this layout");
    }
    out << "sample,vector";
    for (int z = 0; z < clock_zone_count; ++z)
    {
        out << ",clock" << z;
    }
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        out << ',' << cell_column_name(lyt, i);
    }
    out << '\n';
    for (std::size_t s = 0; s < tr.sample_count(); ++s)
    {
        out << s << ',' << tr.vector_index(s);
        for (const auto g : tr.gammas(s))
        {
            out << ',' << six_digits(g);
        }
        for (const auto p : tr.polarizations(s))
        {
            out << ',' << six_digits(p);
        }
        out << '\n';
    }
}

}  // namespace qcaforge
