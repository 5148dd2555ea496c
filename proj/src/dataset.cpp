#include "pvt/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

namespace {

constexpr std::size_t idx(Column c) {
    return static_cast<std::size_t>(c);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Rows are counted over data rows (1-based, header excluded); the file line is
// reported alongside.
double parse_cell(const std::string& cell, std::size_t row, std::size_t line, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        std::ostringstream msg;
        msg << "parse error at row " << row << " (file line " << line << "), column " << col
            << " (" << kColumnNames[col - 1] << "): '" << cell << "' is not a number";
        throw ParseError(msg.str(), row, col);
    }
    return v;
}

} // namespace

std::string_view column_name(Column c) {
    return kColumnNames.at(idx(c));
}

Column column_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kColumnCount; ++i)
        if (kColumnNames[i] == name) return static_cast<Column>(i);
    throw ValidationError("unknown column '" + std::string(name) + "'");
}

// RawRecord -------------------------------------------------------------------

std::array<double, kInputCount> RawRecord::inputs() const {
    return {inlet_temp, flow_rate, heat, solar_radiation, sun_heat};
}

double RawRecord::get(Column c) const {
    switch (c) {
    case Column::InletTemp: return inlet_temp;
    case Column::FlowRate: return flow_rate;
    case Column::Heat: return heat;
    case Column::SolarRadiation: return solar_radiation;
    case Column::SunHeat: return sun_heat;
    case Column::ElectricalEfficiency:
        if (!electrical_efficiency) throw ValidationError("record has no electrical_efficiency");
        return *electrical_efficiency;
    }
    throw ValidationError("unknown column id");
}

void RawRecord::set(Column c, double v) {
    switch (c) {
    case Column::InletTemp: inlet_temp = v; return;
    case Column::FlowRate: flow_rate = v; return;
    case Column::Heat: heat = v; return;
    case Column::SolarRadiation: solar_radiation = v; return;
    case Column::SunHeat: sun_heat = v; return;
    case Column::ElectricalEfficiency: electrical_efficiency = v; return;
    }
    throw ValidationError("unknown column id");
}

void validate_record(const RawRecord& r) {
    for (double v : r.inputs())
        if (!std::isfinite(v)) throw ValidationError("record has a non-finite input");
    if (r.electrical_efficiency && !std::isfinite(*r.electrical_efficiency))
        throw ValidationError("record has a non-finite electrical_efficiency");
    if (!(r.flow_rate > 0.0)) throw ValidationError("flow_rate must be positive");
    if (r.solar_radiation < 0.0) throw ValidationError("solar_radiation must be non-negative");
}

// Dataset ---------------------------------------------------------------------

Dataset::Dataset(std::vector<RawRecord> records) : records_(std::move(records)) {
    for (const auto& r : records_) validate_record(r);
    if (!records_.empty()) {
        const bool labelled = records_.front().electrical_efficiency.has_value();
        for (const auto& r : records_)
            if (r.electrical_efficiency.has_value() != labelled)
                throw ValidationError("dataset mixes labelled and unlabelled records");
    }
}

bool Dataset::has_target() const noexcept {
    return !records_.empty() && records_.front().electrical_efficiency.has_value();
}

Vector Dataset::column(Column c) const {
    Vector v(static_cast<Eigen::Index>(records_.size()));
    for (std::size_t i = 0; i < records_.size(); ++i) v[static_cast<Eigen::Index>(i)] = records_[i].get(c);
    return v;
}

Matrix Dataset::inputs() const {
    Matrix m(static_cast<Eigen::Index>(records_.size()), static_cast<Eigen::Index>(kInputCount));
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto in = records_[i].inputs();
        for (std::size_t j = 0; j < kInputCount; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = in[j];
    }
    return m;
}

Vector Dataset::targets() const {
    if (!has_target()) throw ValidationError("dataset has no electrical_efficiency column");
    return column(Column::ElectricalEfficiency);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    std::vector<RawRecord> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(records_.at(i));
    Dataset d;
    d.records_ = std::move(out);
    return d;
}

Samples Samples::subset(const std::vector<std::size_t>& indices) const {
    Samples s;
    s.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
    if (y.size() > 0) s.y.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(indices[r]);
        s.x.row(static_cast<Eigen::Index>(r)) = x.row(src);
        if (y.size() > 0) s.y[static_cast<Eigen::Index>(r)] = y[src];
    }
    return s;
}

// Scaler ----------------------------------------------------------------------

Scaler::Scaler(std::array<std::optional<ColumnRange>, kColumnCount> ranges) : ranges_(ranges) {
    for (std::size_t i = 0; i < kColumnCount; ++i)
        if (ranges_[i] && !(ranges_[i]->max > ranges_[i]->min))
            throw ValidationError("scaler column '" + std::string(kColumnNames[i]) +
                                  "' needs max > min");
}

Scaler Scaler::fit(const Dataset& d) {
    if (d.empty()) throw ValidationError("cannot fit a scaler on an empty dataset");
    std::array<std::optional<ColumnRange>, kColumnCount> ranges{};
    const std::size_t cols = d.has_target() ? kColumnCount : kInputCount;
    for (std::size_t c = 0; c < cols; ++c) {
        const Vector v = d.column(static_cast<Column>(c));
        ColumnRange r{v.minCoeff(), v.maxCoeff()};
        if (!(r.max > r.min))
            throw ValidationError("degenerate column '" + std::string(kColumnNames[c]) +
                                  "': max equals min, cannot normalize");
        ranges[c] = r;
    }
    return Scaler(ranges);
}

const ColumnRange& Scaler::range(Column c) const {
    const auto& r = ranges_.at(idx(c));
    if (!r) throw ValidationError("scaler has no range for column '" + std::string(column_name(c)) + "'");
    return *r;
}

double Scaler::normalize(Column c, double value) const {
    const auto& r = range(c);
    return 2.0 * (value - r.min) / (r.max - r.min) - 1.0;
}

double Scaler::denormalize(Column c, double value) const {
    const auto& r = range(c);
    return (value + 1.0) * (r.max - r.min) / 2.0 + r.min;
}

Samples Scaler::transform(const Dataset& d) const {
    Samples s;
    const auto n = static_cast<Eigen::Index>(d.size());
    s.x.resize(n, static_cast<Eigen::Index>(kInputCount));
    for (Eigen::Index i = 0; i < n; ++i)
        for (std::size_t j = 0; j < kInputCount; ++j)
            s.x(i, static_cast<Eigen::Index>(j)) =
                normalize(static_cast<Column>(j), d[static_cast<std::size_t>(i)].get(static_cast<Column>(j)));
    if (d.has_target() && has(Column::ElectricalEfficiency)) {
        s.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
            s.y[i] = normalize(Column::ElectricalEfficiency,
                               *d[static_cast<std::size_t>(i)].electrical_efficiency);
    }
    return s;
}

Vector Scaler::denormalize_targets(const Vector& normalized) const {
    Vector out(normalized.size());
    for (Eigen::Index i = 0; i < normalized.size(); ++i)
        out[i] = denormalize(Column::ElectricalEfficiency, normalized[i]);
    return out;
}

std::pair<Samples, Scaler> fit_normalize(const Dataset& d) {
    Scaler s = Scaler::fit(d);
    return {s.transform(d), s};
}

// Split -----------------------------------------------------------------------

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    RandomStream rng(seed, 0x53504C4954ULL);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.index(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

SplitResult split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ValidationError("train fraction must lie in (0, 1)");
    const std::size_t n = d.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 0.5));
    if (n_train == 0 || n_train >= n)
        throw ValidationError("split would leave an empty train or test partition");

    const auto perm = permutation(n, seed);
    SplitResult out;
    out.seed = seed;
    out.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    out.train = d.subset(out.train_indices);
    out.test = d.subset(out.test_indices);
    return out;
}

// CSV -------------------------------------------------------------------------

Dataset read_csv(std::istream& in, bool require_target) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto header = split_fields(line);

    const bool full = header.size() == kColumnCount;
    if (!(full || (!require_target && header.size() == kInputCount))) {
        std::ostringstream msg;
        msg << "schema error: expected " << kColumnCount << " columns, found " << header.size();
        if (header.size() < kColumnCount)
            msg << "; missing column '" << kColumnNames[std::min(header.size(), kColumnCount - 1)] << "'";
        throw SchemaError(msg.str());
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] != kColumnNames[c])
            throw SchemaError("schema error: column " + std::to_string(c + 1) + " is '" + header[c] +
                              "', expected '" + std::string(kColumnNames[c]) + "'");
    }

    std::vector<RawRecord> records;
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError("parse error at row " + std::to_string(row) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             row, fields.size());
        RawRecord r;
        for (std::size_t c = 0; c < fields.size(); ++c)
            r.set(static_cast<Column>(c), parse_cell(fields[c], row, line_no, c + 1));
        try {
            validate_record(r);
        } catch (const ValidationError& e) {
            throw ParseError("invalid record at row " + std::to_string(row) + ": " + e.what(), row, 0);
        }
        records.push_back(r);
    }
    return Dataset(std::move(records));
}

namespace {
Dataset load_impl(const std::filesystem::path& path, bool require_target) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_csv(in, require_target);
}
} // namespace

Dataset load_csv(const std::filesystem::path& path) {
    return load_impl(path, true);
}

Dataset load_csv_inputs(const std::filesystem::path& path) {
    return load_impl(path, false);
}

void write_csv(std::ostream& out, const Dataset& d) {
    const bool labelled = d.has_target();
    const std::size_t cols = labelled ? kColumnCount : kInputCount;
    for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << kColumnNames[c];
    out << '\n';
    out << std::setprecision(17);
    for (const auto& r : d.records()) {
        for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << r.get(static_cast<Column>(c));
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(out, d);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Synthetic -------------------------------------------------------------------

Dataset generate_synthetic(std::size_t n, std::uint64_t seed, double noise_sd,
                           const SyntheticConfig& cfg) {
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw ValidationError("noise_sd must be a finite non-negative number");
    std::vector<RawRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(seed, i);
        RawRecord r;
        r.inlet_temp = rng.uniform(cfg.inlet_min, cfg.inlet_max);
        r.flow_rate = rng.uniform(cfg.flow_min, cfg.flow_max);
        r.solar_radiation = rng.uniform(cfg.radiation_min, cfg.radiation_max);
        r.sun_heat = r.solar_radiation * cfg.aperture_area;
        const double t_cell =
            r.inlet_temp + cfg.cell_heating * r.solar_radiation / (cfg.flow_offset + r.flow_rate);
        r.heat = cfg.heat_removal * r.flow_rate * (t_cell - r.inlet_temp);
        const double noise = noise_sd > 0.0 ? rng.normal(0.0, noise_sd) : 0.0;
        r.electrical_efficiency =
            cfg.nominal_efficiency * (1.0 - cfg.derating * (t_cell - cfg.reference_temp)) + noise;
        records.push_back(r);
    }
    return Dataset(std::move(records));
}

} // namespace pvt
