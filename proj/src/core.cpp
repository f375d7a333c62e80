#include "veil/core.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace veil {

uint64_t Dataset::max_key_volume() const {
    std::unordered_map<std::string, uint64_t> counts;
    counts.reserve(records.size());
    uint64_t best = 0;
    for (const auto& r : records) {
        uint64_t c = ++counts[r.key];
        if (c > best) best = c;
    }
    return best;
}

void Params::validate() const {
    if (qa < 1.0) throw InvalidSpec("qa must be >= 1");
    if (sa < 1.0) throw InvalidSpec("sa must be >= 1");
    if (fanout == 0) throw InvalidSpec("fanout must be >= 1");
    if (desired_overlap && degree == 0)
        throw InvalidSpec("desired overlap requires degree >= 1");
    if (record_width < 9 + 2)  // header plus any room at all
        throw InvalidSpec("record width too small");
}

Dataset read_dataset_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path.string());
    Dataset ds;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error("dataset line " + std::to_string(lineno) +
                        " has no TAB separator");
        ds.records.push_back(
            {line.substr(0, tab), line.substr(tab + 1), RecordKind::Real});
    }
    return ds;
}

void write_dataset_tsv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write dataset file: " + path.string());
    for (const auto& r : dataset.records) {
        out << r.key << '\t' << r.value << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace veil
