#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pvt/linalg.hpp"

namespace pvt {

/// Fixed column order of every data file. The order is part of the external
/// contract: Andrews curves and the design matrices depend on it.
enum class Column : std::size_t {
    InletTemp = 0,
    FlowRate = 1,
    Heat = 2,
    SolarRadiation = 3,
    SunHeat = 4,
    ElectricalEfficiency = 5,
};

inline constexpr std::size_t kInputCount = 5;
inline constexpr std::size_t kColumnCount = 6;
inline constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "inlet_temp", "flow_rate", "heat", "solar_radiation", "sun_heat", "electrical_efficiency"};

std::string_view column_name(Column c);
/// Throws ValidationError for an unknown name.
Column column_from_name(std::string_view name);

/// One measurement: inlet temperature (°C), flow rate (L/min), heat (W),
/// solar radiation (W/m²), sun heat (W) and, for labelled data, the
/// electrical efficiency (%).
struct RawRecord {
    double inlet_temp = 0.0;
    double flow_rate = 0.0;
    double heat = 0.0;
    double solar_radiation = 0.0;
    double sun_heat = 0.0;
    std::optional<double> electrical_efficiency;

    std::array<double, kInputCount> inputs() const;
    /// Throws ValidationError when asking for a missing target.
    double get(Column c) const;
    void set(Column c, double v);

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Throws ValidationError when a field is non-finite, flow_rate <= 0 or
/// solar_radiation < 0.
void validate_record(const RawRecord& r);

/// Ordered collection of records sharing the fixed schema.
class Dataset {
public:
    Dataset() = default;
    /// Validates every record. Either all records carry a target or none do.
    explicit Dataset(std::vector<RawRecord> records);

    const std::vector<RawRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    bool has_target() const noexcept;
    const RawRecord& operator[](std::size_t i) const { return records_[i]; }

    Vector column(Column c) const;
    /// n×5 matrix of raw inputs.
    Matrix inputs() const;
    /// Targets; throws ValidationError when the dataset is unlabelled.
    Vector targets() const;

    Dataset subset(const std::vector<std::size_t>& indices) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<RawRecord> records_;
};

/// Normalized design data handed to the models: one row per record.
struct Samples {
    Matrix x;
    Vector y;  // empty for unlabelled data

    std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
    Samples subset(const std::vector<std::size_t>& indices) const;
};

struct ColumnRange {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Per-column min-max map onto [-1, 1].
class Scaler {
public:
    Scaler() = default;
    explicit Scaler(std::array<std::optional<ColumnRange>, kColumnCount> ranges);

    /// Fits every column present in `d` (the target only when labelled).
    /// Throws ValidationError on an empty dataset or a constant column.
    static Scaler fit(const Dataset& d);

    bool has(Column c) const { return ranges_[static_cast<std::size_t>(c)].has_value(); }
    const ColumnRange& range(Column c) const;

    double normalize(Column c, double value) const;
    double denormalize(Column c, double value) const;
    Samples transform(const Dataset& d) const;
    Vector denormalize_targets(const Vector& normalized) const;

    friend bool operator==(const Scaler&, const Scaler&) = default;

private:
    std::array<std::optional<ColumnRange>, kColumnCount> ranges_{};
};

std::pair<Samples, Scaler> fit_normalize(const Dataset& d);

struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

/// Train size is round(n·fraction) with halves going to train (98 -> 74/24).
SplitResult split(const Dataset& d, double train_fraction, std::uint64_t seed);

/// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

// CSV ----------------------------------------------------------------------

/// Labelled file with the full 6-column header.
Dataset load_csv(const std::filesystem::path& path);
/// Accepts the 6-column header or the 5 input columns alone.
Dataset load_csv_inputs(const std::filesystem::path& path);
Dataset read_csv(std::istream& in, bool require_target = true);
void write_csv(std::ostream& out, const Dataset& d);
void save_csv(const std::filesystem::path& path, const Dataset& d);

// Synthetic data -------------------------------------------------------------

/// Constants of the stand-in physics used by generate_synthetic.
///
/// Cell temperature: T_cell = inlet + cell_heating·G / (flow_offset + flow).
/// Heat collected:  Q = heat_removal·flow·(T_cell - inlet).
/// Efficiency:      eta = nominal_efficiency·(1 - derating·(T_cell - 25)).
struct SyntheticConfig {
    double inlet_min = 20.0, inlet_max = 45.0;            // °C
    double flow_min = 0.5, flow_max = 4.0;                // L/min
    double radiation_min = 600.0, radiation_max = 1000.0; // W/m²
    double aperture_area = 0.7;                           // m²
    double nominal_efficiency = 12.5;                     // %
    double derating = 0.004;                              // 1/°C
    double reference_temp = 25.0;                         // °C
    double cell_heating = 0.045;                          // °C·(L/min)/(W/m²)
    double flow_offset = 0.5;                             // L/min
    double heat_removal = 7.0;                            // W/((L/min)·°C)
};

Dataset generate_synthetic(std::size_t n, std::uint64_t seed, double noise_sd,
                           const SyntheticConfig& cfg = {});

} // namespace pvt
