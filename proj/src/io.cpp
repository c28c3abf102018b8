#include "sda/io.hpp"

#include "sda/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <vector>

namespace sda {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
    field = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError(fmt::format("line {}: '{}' is not a number", line_no, field));
    }
    return v;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

DatasetFile read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("line 1: missing header");
    const auto header = split(trim(line));
    if (header.size() < 2 || trim(header[0]) != "t") throw DataError("line 1: header must start with 't,y1'");
    bool has_label = trim(header.back()) == "label";
    const std::size_t d = header.size() - 1 - (has_label ? 1 : 0);
    if (d < 1) throw DataError("line 1: header names no y columns");
    for (std::size_t c = 0; c < d; ++c) {
        if (trim(header[c + 1]) != fmt::format("y{}", c + 1))
            throw DataError(fmt::format("line 1: expected column 'y{}', found '{}'", c + 1, trim(header[c + 1])));
    }

    std::vector<double> times;
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line));
        if (fields.size() != header.size()) {
            throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no, header.size(), fields.size()));
        }
        const double t = parse_number(fields[0], line_no);
        if (!(t >= 0.0 && t <= 1.0)) throw DataError(fmt::format("line {}: time {} outside [0, 1]", line_no, t));
        times.push_back(t);
        for (std::size_t c = 0; c < d; ++c) values.push_back(parse_number(fields[c + 1], line_no));
        if (has_label) {
            const double l = parse_number(fields.back(), line_no);
            if (l < 1.0 || l != static_cast<double>(static_cast<int>(l)))
                throw DataError(fmt::format("line {}: label must be a positive integer", line_no));
            labels.push_back(static_cast<int>(l) - 1);
        }
    }
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd targets(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(d); ++c)
            targets(i, c) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(c)];
    DatasetFile file{Dataset(Eigen::Map<Eigen::VectorXd>(times.data(), n), std::move(targets)), std::nullopt};
    if (has_label) file.labels = Assignment{std::move(labels)};
    return file;
}

DatasetFile read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const Assignment* labels) {
    if (labels && static_cast<Eigen::Index>(labels->labels.size()) != data.size())
        throw ShapeError("label count does not match the dataset");
    std::string text = "t";
    for (Eigen::Index c = 0; c < data.dim(); ++c) text += fmt::format(",y{}", c + 1);
    if (labels) text += ",label";
    text += '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        text += format_double(data.times()(i));
        for (Eigen::Index c = 0; c < data.dim(); ++c) {
            text += ',';
            text += format_double(data.targets()(i, c));
        }
        if (labels) text += fmt::format(",{}", labels->labels[static_cast<std::size_t>(i)] + 1);
        text += '\n';
    }
    out << text;
}

void write_trajectory_csv(std::ostream& out, const TrajectorySet& set) {
    std::string text = "t,track";
    for (Eigen::Index c = 0; c < set.dim(); ++c) text += fmt::format(",y{}", c + 1);
    text += '\n';
    for (Eigen::Index g = 0; g < set.nodes(); ++g) {
        for (std::size_t j = 0; j < set.size(); ++j) {
            text += format_double(set[j].node_time(g));
            text += fmt::format(",{}", j + 1);
            for (Eigen::Index c = 0; c < set.dim(); ++c) {
                text += ',';
                text += format_double(set[j].values()(g, c));
            }
            text += '\n';
        }
    }
    out << text;
}

TrajectorySet read_trajectory_csv(std::istream& in, int order, double delta) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("line 1: missing header");
    const auto header = split(trim(line));
    if (header.size() < 3 || trim(header[0]) != "t" || trim(header[1]) != "track")
        throw DataError("line 1: header must be 't,track,y1..yd'");
    const std::size_t d = header.size() - 2;

    std::map<int, std::vector<std::vector<double>>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line));
        if (fields.size() != header.size())
            throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no, header.size(), fields.size()));
        const auto track = static_cast<int>(parse_number(fields[1], line_no));
        if (track < 1) throw DataError(fmt::format("line {}: track index must be >= 1", line_no));
        std::vector<double> point;
        for (std::size_t c = 0; c < d; ++c) point.push_back(parse_number(fields[c + 2], line_no));
        rows[track].push_back(std::move(point));
    }
    if (rows.empty()) throw DataError("trajectory file has no rows");

    std::vector<GridTrajectory> tracks;
    int expected = 1;
    for (auto& [track, points] : rows) {
        if (track != expected++) throw DataError("trajectory file: track indices must be 1..k without gaps");
        Eigen::MatrixXd v(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(d));
        for (std::size_t g = 0; g < points.size(); ++g)
            for (std::size_t c = 0; c < d; ++c) v(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(c)) = points[g][c];
        tracks.emplace_back(std::move(v));
    }
    return {std::move(tracks), order, delta};
}

}  // namespace sda
