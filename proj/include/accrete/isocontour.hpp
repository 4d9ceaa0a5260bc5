#pragma once

#include <vector>

#include "field.hpp"

namespace accrete {

/// One straight piece of a level set, with the cell that produced it.
struct IsoSegment {
    Vec2 a{};
    Vec2 b{};
    int ci = 0;
    int cj = 0;
};

/// Marching-squares extraction of the level set {f = level}. Corners with
/// f < level count as inside; crossings are linearly interpolated along cell
/// edges; the two saddle configurations are disambiguated by the cell-center
/// average. Output order is deterministic (cells row-major).
inline std::vector<IsoSegment> extract_isocontour(const ScalarField& f, double level) {
    const Grid2& g = f.grid();
    std::vector<IsoSegment> segs;
    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double f00 = f.at(i, j), f10 = f.at(i + 1, j);
            const double f11 = f.at(i + 1, j + 1), f01 = f.at(i, j + 1);
            const int code = (f00 < level ? 1 : 0) | (f10 < level ? 2 : 0) |
                             (f11 < level ? 4 : 0) | (f01 < level ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const Vec2 p00 = g.pos(i, j), p10 = g.pos(i + 1, j);
            const Vec2 p11 = g.pos(i + 1, j + 1), p01 = g.pos(i, j + 1);
            auto lerp = [level](const Vec2& pa, double fa, const Vec2& pb, double fb) {
                const double t = (level - fa) / (fb - fa);
                return Vec2{pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
            };
            auto bottom = [&] { return lerp(p00, f00, p10, f10); };
            auto right = [&] { return lerp(p10, f10, p11, f11); };
            auto top = [&] { return lerp(p01, f01, p11, f11); };
            auto left = [&] { return lerp(p00, f00, p01, f01); };
            auto emit = [&](const Vec2& a, const Vec2& b) {
                segs.push_back({a, b, i, j});
            };

            switch (code) {
                case 1: case 14: emit(left(), bottom()); break;
                case 2: case 13: emit(bottom(), right()); break;
                case 3: case 12: emit(left(), right()); break;
                case 4: case 11: emit(right(), top()); break;
                case 6: case 9:  emit(bottom(), top()); break;
                case 7: case 8:  emit(left(), top()); break;
                case 5: case 10: {
                    const double center = 0.25 * (f00 + f10 + f11 + f01);
                    const bool center_in = center < level;
                    const bool corners_in_00_11 = (code == 5);
                    if (center_in == corners_in_00_11) {
                        emit(left(), top());
                        emit(bottom(), right());
                    } else {
                        emit(left(), bottom());
                        emit(right(), top());
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segs;
}

inline double contour_length(const std::vector<IsoSegment>& segs) {
    double len = 0.0;
    for (const IsoSegment& s : segs) len += norm(s.b - s.a);
    return len;
}

}  // namespace accrete
