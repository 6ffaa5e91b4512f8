#pragma once

#include <cbp/mesh.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace cbp {
namespace io {

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter
{
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path)
    {
        check(bool(out_), "csv: cannot open " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells)
    {
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream out_;
};

// 3D meshes: boundary triangles; 2D meshes: boundary line loops at z = 0.
template <int N>
void write_obj(const World<N>& w, const std::string& path)
{
    std::ofstream out(path);
    check(bool(out), "obj: cannot open " + path);
    for (const auto& x : w.pos) {
        out << "v " << fmt(x[0]) << " " << fmt(x[1]) << " " << fmt(N == 3 ? x[2] : 0.0) << "\n";
    }
    if constexpr (N == 3) {
        for (const auto& f : w.bfaces)
            out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    } else {
        // chain boundary edges into closed loops
        std::map<int, int> next;
        for (const auto& e : w.bedges)
            next[e[0]] = e[1];
        std::map<int, bool> used;
        for (const auto& [v, n] : next) {
            if (used[v])
                continue;
            out << "l";
            int cur = v;
            do {
                out << " " << cur + 1;
                used[cur] = true;
                cur = next.at(cur);
            } while (cur != v);
            out << " " << v + 1 << "\n";
        }
    }
}

} // namespace io
} // namespace cbp
