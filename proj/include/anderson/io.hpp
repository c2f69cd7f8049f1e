#pragma once

// Atomic result files and provenance headers. Every emitted file carries
// enough metadata to re-run the experiment that produced it.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef ANDERSON_GIT_DESCRIBE
#define ANDERSON_GIT_DESCRIBE "unknown"
#endif

namespace anderson {
namespace io {

struct Provenance {
    std::vector<std::pair<std::string, std::string>> fields;

    void add(const std::string& k, const std::string& v) { fields.emplace_back(k, v); }
    void add(const std::string& k, double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        fields.emplace_back(k, os.str());
    }
    void add(const std::string& k, long v) { fields.emplace_back(k, std::to_string(v)); }
    void add(const std::string& k, uint64_t v) { fields.emplace_back(k, std::to_string(v)); }

    std::string csv_header() const {
        std::ostringstream os;
        os << "# generator=anderson " << ANDERSON_GIT_DESCRIBE << "\n";
        for (const auto& kv : fields) os << "# " << kv.first << "=" << kv.second << "\n";
        return os.str();
    }
    std::string json_object() const {
        std::ostringstream os;
        os << "{\"generator\": \"anderson " << ANDERSON_GIT_DESCRIBE << "\"";
        for (const auto& kv : fields) os << ", \"" << kv.first << "\": \"" << kv.second << "\"";
        os << "}";
        return os.str();
    }
};

// Write-then-rename; the destination never holds a partial file.
inline void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        os << contents;
        if (!os) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

// Long-format CSV: provenance comments, one header row, one observation
// per data row.
class CsvBuilder {
  public:
    CsvBuilder(const Provenance& prov, const std::vector<std::string>& columns) {
        os_.precision(12);
        os_ << prov.csv_header();
        for (size_t i = 0; i < columns.size(); ++i)
            os_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
    template <class... Ts>
    void row(Ts&&... vals) {
        row_impl(std::forward<Ts>(vals)...);
        os_ << "\n";
    }
    std::string str() const { return os_.str(); }

  private:
    void row_impl() {}
    template <class T, class... Rest>
    void row_impl(T&& v, Rest&&... rest) {
        os_ << v;
        if (sizeof...(rest) > 0) os_ << ",";
        row_impl(std::forward<Rest>(rest)...);
    }
    std::ostringstream os_;
};

}  // namespace io
}  // namespace anderson
