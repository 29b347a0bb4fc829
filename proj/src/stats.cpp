#include "stats.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "error.hpp"

namespace pogest {

void ClassTable::validate() const {
    require_valid(!names.empty(), "class table: empty");
    std::set<std::string> seen;
    for (const auto& n : names) {
        require_valid(!n.empty(), "class table: empty class name");
        require_valid(seen.insert(n).second, "class table: duplicate class name " + n);
    }
}

ClassTable load_class_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) Error::io("cannot open class table: " + path);
    ClassTable table;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) table.names.push_back(line);
    }
    table.validate();
    return table;
}

void save_class_table(const ClassTable& table, const std::string& path) {
    table.validate();
    std::ofstream out(path);
    if (!out) Error::io("cannot write class table: " + path);
    for (const auto& n : table.names) out << n << '\n';
}

namespace {

void check_map(const LabelMap& map, const ClassTable& table) {
    require_valid(map.channels == 1, "label map: must be single-channel");
    for (uint8_t v : map.px)
        require_valid(v < table.size(),
                      "label map: unknown class index " + std::to_string(static_cast<int>(v)));
}

} // namespace

std::vector<double> image_class_presence(std::span<const LabelMap> maps, const ClassTable& table) {
    table.validate();
    require_valid(!maps.empty(), "image presence: no label maps");
    std::vector<size_t> containing(table.size(), 0);
    for (const auto& map : maps) {
        check_map(map, table);
        std::vector<bool> present(table.size(), false);
        for (uint8_t v : map.px) present[v] = true;
        for (int c = 0; c < table.size(); ++c)
            if (present[c]) ++containing[c];
    }
    std::vector<double> out(table.size());
    for (int c = 0; c < table.size(); ++c)
        out[c] = static_cast<double>(containing[c]) / static_cast<double>(maps.size());
    return out;
}

std::vector<double> pixel_class_share(std::span<const LabelMap> maps, const ClassTable& table) {
    table.validate();
    require_valid(!maps.empty(), "pixel share: no label maps");
    std::vector<uint64_t> counts(table.size(), 0);
    uint64_t total = 0;
    for (const auto& map : maps) {
        check_map(map, table);
        for (uint8_t v : map.px) ++counts[v];
        total += map.px.size();
    }
    require_valid(total > 0, "pixel share: empty label maps");
    std::vector<double> out(table.size());
    for (int c = 0; c < table.size(); ++c)
        out[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
    return out;
}

FixationDistribution fixation_class_distribution(std::span<const LabelMap> maps,
                                                 std::span<const GazePoint> gazes,
                                                 const ClassTable& table) {
    table.validate();
    require_valid(maps.size() == gazes.size(), "fixation distribution: map/gaze length mismatch");
    require_valid(!maps.empty(), "fixation distribution: empty input");

    std::vector<uint64_t> counts(table.size(), 0);
    FixationDistribution out;
    uint64_t used = 0;
    for (size_t i = 0; i < maps.size(); ++i) {
        check_map(maps[i], table);
        const long x = std::lround(gazes[i].x); // round half away from zero
        const long y = std::lround(gazes[i].y);
        if (x < 0 || y < 0 || x >= maps[i].width || y >= maps[i].height) {
            ++out.skipped;
            continue;
        }
        ++counts[maps[i].at(static_cast<int>(x), static_cast<int>(y), 0)];
        ++used;
    }
    out.fraction.assign(table.size(), 0.0);
    if (used > 0)
        for (int c = 0; c < table.size(); ++c)
            out.fraction[c] = static_cast<double>(counts[c]) / static_cast<double>(used);
    return out;
}

} // namespace pogest
