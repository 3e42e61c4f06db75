#include "orisurf/polygon.hpp"

#include <algorithm>

namespace orisurf {

double signed_area(const Polygon& poly)
{
    const size_t n = poly.size();
    if (n < 3)
        return 0.0;
    double twice = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

Vec2 centroid(const Polygon& poly)
{
    const size_t n = poly.size();
    if (n == 0)
        return Vec2::Zero();
    const double a = signed_area(poly);
    if (std::abs(a) < 1e-300) {
        Vec2 mean = Vec2::Zero();
        for (const auto& p : poly)
            mean += p;
        return mean / static_cast<double>(n);
    }
    // Shift to the first vertex to limit cancellation for small polygons far
    // from the origin.
    const Vec2 o = poly[0];
    Vec2 c = Vec2::Zero();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i] - o;
        const Vec2 q = poly[(i + 1) % n] - o;
        const double cross = p.x() * q.y() - q.x() * p.y();
        c += (p + q) * cross;
    }
    return o + c / (6.0 * a);
}

void make_ccw(Polygon& poly)
{
    if (signed_area(poly) < 0.0)
        std::reverse(poly.begin(), poly.end());
}

Polygon clip_half_plane(const Polygon& poly, const Vec2& normal, double offset)
{
    Polygon out;
    const size_t n = poly.size();
    if (n == 0)
        return out;
    out.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& cur = poly[i];
        const Vec2& nxt = poly[(i + 1) % n];
        const double dc = normal.dot(cur) + offset;
        const double dn = normal.dot(nxt) + offset;
        if (dc >= 0.0)
            out.push_back(cur);
        if ((dc >= 0.0) != (dn >= 0.0)) {
            const double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip)
{
    Polygon out = subject;
    const size_t n = clip.size();
    for (size_t i = 0; i < n && !out.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % n];
        const Vec2 edge = b - a;
        // Inward normal of a CCW edge.
        const Vec2 inward(-edge.y(), edge.x());
        out = clip_half_plane(out, inward, -inward.dot(a));
    }
    return out;
}

Polygon convex_hull(std::vector<Vec2> points)
{
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3)
        return points;

    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    Polygon hull(2 * points.size());
    size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0)
            --k;
        hull[k++] = p;
    }
    for (size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
        const Vec2& p = points[i];
        while (k >= t && cross(hull[k - 2], hull[k - 1], p) <= 0.0)
            --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

Polygon square(const Vec2& center, double side)
{
    const double h = 0.5 * side;
    return {center + Vec2(-h, -h), center + Vec2(h, -h), center + Vec2(h, h), center + Vec2(-h, h)};
}

} // namespace orisurf
