#include "nbcr/marching_squares.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace nbcr {
namespace {

// Edge ids are shared by neighbouring cells so segment endpoints stitch exactly.
struct EdgeKey {
    static std::int64_t horizontal(Eigen::Index i, Eigen::Index j, Eigen::Index rows) { return 2 * (j * rows + i); }
    static std::int64_t vertical(Eigen::Index i, Eigen::Index j, Eigen::Index rows) { return 2 * (j * rows + i) + 1; }
};

struct Segment {
    std::int64_t a;
    std::int64_t b;
};

} // namespace

std::vector<Polyline> extract_isolines(const Eigen::ArrayXXd& field, double level,
                                       const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys) {
    const Eigen::Index rows = field.rows();
    const Eigen::Index cols = field.cols();
    std::vector<Polyline> lines;
    if (rows < 2 || cols < 2)
        return lines;

    std::unordered_map<std::int64_t, Eigen::Vector2d> vertex;
    std::vector<Segment> segments;

    const auto crossing = [&](Eigen::Index i0, Eigen::Index j0, Eigen::Index i1, Eigen::Index j1) {
        const double v0 = field(i0, j0);
        const double v1 = field(i1, j1);
        const double t = (level - v0) / (v1 - v0);
        const Eigen::Vector2d p0(xs[i0], ys[j0]);
        const Eigen::Vector2d p1(xs[i1], ys[j1]);
        return Eigen::Vector2d(p0 + t * (p1 - p0));
    };

    for (Eigen::Index j = 0; j + 1 < cols; ++j) {
        for (Eigen::Index i = 0; i + 1 < rows; ++i) {
            // corners counter-clockwise from (i, j)
            const std::array<double, 4> v{field(i, j), field(i + 1, j), field(i + 1, j + 1), field(i, j + 1)};
            if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3]))
                continue;
            std::array<bool, 4> in{};
            for (int c = 0; c < 4; ++c)
                in[c] = v[c] <= level;
            if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3])
                continue;

            const std::array<std::int64_t, 4> edge{
                EdgeKey::horizontal(i, j, rows), EdgeKey::vertical(i + 1, j, rows),
                EdgeKey::horizontal(i, j + 1, rows), EdgeKey::vertical(i, j, rows)};
            const std::array<std::array<Eigen::Index, 4>, 4> ends{{
                {i, j, i + 1, j}, {i + 1, j, i + 1, j + 1}, {i, j + 1, i + 1, j + 1}, {i, j, i, j + 1}}};

            std::array<int, 4> cut{};
            int ncut = 0;
            for (int e = 0; e < 4; ++e) {
                const int c0 = e;
                const int c1 = (e + 1) % 4;
                if (in[c0] != in[c1]) {
                    cut[ncut++] = e;
                    if (!vertex.contains(edge[e])) {
                        const auto& k = ends[e];
                        vertex.emplace(edge[e], crossing(k[0], k[1], k[2], k[3]));
                    }
                }
            }

            if (ncut == 2) {
                segments.push_back({edge[cut[0]], edge[cut[1]]});
            } else if (ncut == 4) {
                const bool centre_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) <= level;
                if (centre_in == in[0]) {
                    // corners 0 and 2 joined through the centre: cut off corners 1 and 3
                    segments.push_back({edge[0], edge[1]});
                    segments.push_back({edge[2], edge[3]});
                } else {
                    segments.push_back({edge[3], edge[0]});
                    segments.push_back({edge[1], edge[2]});
                }
            }
        }
    }

    std::unordered_map<std::int64_t, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s].a].push_back(s);
        incident[segments[s].b].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    const auto trace = [&](std::size_t first, std::int64_t start_edge) {
        Polyline line;
        line.points.push_back(vertex.at(start_edge));
        std::int64_t at = start_edge;
        std::size_t seg = first;
        while (true) {
            used[seg] = true;
            const std::int64_t next = segments[seg].a == at ? segments[seg].b : segments[seg].a;
            line.points.push_back(vertex.at(next));
            at = next;
            if (at == start_edge) {
                line.closed = true;
                break;
            }
            std::size_t follow = segments.size();
            for (const std::size_t cand : incident.at(at)) {
                if (!used[cand]) {
                    follow = cand;
                    break;
                }
            }
            if (follow == segments.size())
                break;
            seg = follow;
        }
        lines.push_back(std::move(line));
    };

    // open chains start at an edge touched by a single segment
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s])
            continue;
        if (incident.at(segments[s].a).size() == 1)
            trace(s, segments[s].a);
        else if (incident.at(segments[s].b).size() == 1)
            trace(s, segments[s].b);
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (!used[s])
            trace(s, segments[s].a);
    }
    return lines;
}

} // namespace nbcr
