#ifndef QCAFORGE_ENGINE_HPP
#define QCAFORGE_ENGINE_HPP

#include "qcaforge/layout.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace qcaforge
{

/**
 * Physical and numerical parameters of the bistable simulation. Defaults follow the common QCADesigner
 * bistable settings.
 */
struct sim_config
{
    double epsilon_r{12.9};
    /// Tunnelling energy while a zone is relaxed (J).
    double gamma_high{9.8e-22};
    /// Tunnelling energy while a zone holds (J).
    double gamma_low{3.8e-23};
    /// Neighbour cutoff, centre to centre (nm).
    double radius_of_effect{65.0};
    double convergence_tolerance{1e-3};
    int max_iterations_per_sample{100};
    /// Under-relaxation of each synchronous sweep, P' = P + w (f - P). 1 is the plain Jacobi update, which
    /// can lock strongly coupled feedback loops into a period-2 oscillation.
    double relaxation_factor{0.8};
    int samples_per_cycle{128};
    double cell_size{18.0};
    /// Distance of each quantum dot from the cell centre along both axes (nm).
    double dot_offset{4.5};

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Trapezoidal four-phase clock: switch (ramp down), hold, release (ramp up), relax, one quarter each.
class clock_schedule
{
  public:
    explicit clock_schedule(const sim_config& cfg);

    [[nodiscard]] int samples_per_cycle() const noexcept
    {
        return samples_per_cycle_;
    }
    [[nodiscard]] double gamma(int zone, long long sample) const noexcept;
    [[nodiscard]] std::array<double, clock_zone_count> gammas(long long sample) const noexcept;

  private:
    int samples_per_cycle_;
    double gamma_low_;
    double gamma_high_;
};

[[nodiscard]] double clock_gamma(int zone, long long sample, const clock_schedule& schedule);

/**
 * Electrostatic kink energy between two cells, E(anti-aligned) - E(aligned), in joules. Positive values
 * favour equal polarizations.
 */
[[nodiscard]] double kink_energy(const cell& a, const cell& b, const sim_config& cfg);

/// Saturating bistable transfer function x / sqrt(1 + x^2).
[[nodiscard]] double response(double activation) noexcept;

/// Sparse, symmetric table of kink energies between cells within the radius of effect.
class coupling_table
{
  public:
    struct entry
    {
        std::size_t neighbour;
        double energy;
    };

    coupling_table(const layout& lyt, const sim_config& cfg);

    [[nodiscard]] std::size_t size() const noexcept
    {
        return offsets_.size() - 1;
    }
    [[nodiscard]] std::span<const entry> neighbours(std::size_t cell) const noexcept
    {
        return {entries_.data() + offsets_[cell], entries_.data() + offsets_[cell + 1]};
    }

  private:
    std::vector<std::size_t> offsets_{};
    std::vector<entry> entries_{};
};

struct relax_result
{
    std::vector<double> polarizations{};
    bool converged{false};
    int iterations{0};
};

/**
 * Synchronous (Jacobi) relaxation of all normal and output cells at fixed per-zone tunnelling energies.
 * Input and fixed cells keep the values in `seed`.
 */
[[nodiscard]] relax_result relax_sample(const layout& lyt, const std::array<double, clock_zone_count>& gammas,
                                        const sim_config& cfg, std::span<const double> seed);
/// Same, seeded from the polarizations stored in the layout cells.
[[nodiscard]] relax_result relax_sample(const layout& lyt, const std::array<double, clock_zone_count>& gammas,
                                        const sim_config& cfg);

/// One stimulus: a value for every input label, held for a whole clock cycle.
using input_vector = std::map<std::string, bool>;

class trace
{
  public:
    trace() = default;
    trace(std::size_t cell_count, int samples_per_cycle) : cell_count_{cell_count}, samples_per_cycle_{samples_per_cycle}
    {}

    [[nodiscard]] std::size_t sample_count() const noexcept
    {
        return vector_index_.size();
    }
    [[nodiscard]] std::size_t cell_count() const noexcept
    {
        return cell_count_;
    }
    [[nodiscard]] int samples_per_cycle() const noexcept
    {
        return samples_per_cycle_;
    }
    [[nodiscard]] std::size_t vector_count() const noexcept
    {
        return samples_per_cycle_ == 0 ? 0 : sample_count() / static_cast<std::size_t>(samples_per_cycle_);
    }
    [[nodiscard]] std::span<const double> polarizations(std::size_t sample) const noexcept
    {
        return {polarizations_.data() + sample * cell_count_, cell_count_};
    }
    [[nodiscard]] double polarization(std::size_t sample, std::size_t cell) const noexcept
    {
        return polarizations_[sample * cell_count_ + cell];
    }
    [[nodiscard]] const std::array<double, clock_zone_count>& gammas(std::size_t sample) const noexcept
    {
        return gammas_[sample];
    }
    [[nodiscard]] std::size_t vector_index(std::size_t sample) const noexcept
    {
        return vector_index_[sample];
    }
    [[nodiscard]] bool converged(std::size_t sample) const noexcept
    {
        return converged_[sample] != 0;
    }
    /// Samples whose relaxation hit the iteration cap.
    [[nodiscard]] std::vector<std::size_t> unconverged_samples() const;

    void append(std::size_t vector, const std::array<double, clock_zone_count>& gammas,
                std::span<const double> polarizations, bool converged);

    bool operator==(const trace&) const = default;

  private:
    std::size_t cell_count_{0};
    int samples_per_cycle_{0};
    std::vector<double> polarizations_{};
    std::vector<std::array<double, clock_zone_count>> gammas_{};
    std::vector<std::size_t> vector_index_{};
    std::vector<unsigned char> converged_{};
};

class simulation_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/**
 * Runs the layout through the clocked relaxation, one clock cycle per input vector. `threads` = 0 selects
 * the hardware concurrency. Results do not depend on the thread count.
 */
[[nodiscard]] trace simulate(const layout& lyt, const std::vector<input_vector>& vectors, const sim_config& cfg,
                             unsigned threads = 1);

/// Worker count from QCAFORGE_THREADS (0 or unset means automatic).
[[nodiscard]] unsigned threads_from_environment();

/// Column name used for a cell in exported traces.
[[nodiscard]] std::string cell_column_name(const layout& lyt, std::size_t cell);

void write_trace_csv(std::ostream& out, const trace& tr, const layout& lyt);

}  // namespace qcaforge

#endif  // QCAFORGE_ENGINE_HPP
