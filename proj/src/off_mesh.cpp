#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "curvflow/errors.hpp"
#include "curvflow/manifold.hpp"

namespace curvflow {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Content lines with blanks and '#' comments removed, paired with their
// 1-based line numbers for error messages.
std::vector<std::pair<std::size_t, std::string>> content_lines(const std::string& text)
{
    std::vector<std::pair<std::size_t, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        out.emplace_back(lineno, std::move(t));
    }
    return out;
}

std::string where(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

}  // namespace

DiscreteManifold parse_off_mesh(const std::string& text, const std::string& label)
{
    const auto lines = content_lines(text);
    if (lines.empty() || lines.front().second != "OFF")
        throw MeshFormatError("first line must be exactly \"OFF\"");
    if (lines.size() < 2)
        throw MeshFormatError("missing vertex/face count line");

    long long nv = -1, nf = -1, ne = -1;
    {
        std::istringstream hdr(lines[1].second);
        std::string extra;
        if (!(hdr >> nv >> nf >> ne) || (hdr >> extra) || nv < 3 || nf < 1 || ne < 0)
            throw MeshFormatError(where(lines[1].first) + "malformed count line");
    }
    if (lines.size() < 2 + static_cast<std::size_t>(nv) + static_cast<std::size_t>(nf))
        throw MeshFormatError("file ends before all vertices and faces were read");

    const auto nverts = static_cast<std::size_t>(nv);
    const auto nfaces = static_cast<std::size_t>(nf);
    std::vector<Vec3> verts(nverts);
    for (std::size_t i = 0; i < nverts; ++i) {
        const auto& [lineno, line] = lines[2 + i];
        std::istringstream in(line);
        std::string extra;
        if (!(in >> verts[i][0] >> verts[i][1] >> verts[i][2]) || (in >> extra))
            throw MeshFormatError(where(lineno) + "expected \"x y z\"");
        for (double x : verts[i])
            if (!std::isfinite(x))
                throw MeshFormatError(where(lineno) + "non-finite coordinate");
    }

    std::vector<std::array<std::size_t, 3>> faces(nfaces);
    for (std::size_t f = 0; f < nfaces; ++f) {
        const auto& [lineno, line] = lines[2 + nverts + f];
        std::istringstream in(line);
        long long k = 0;
        if (!(in >> k))
            throw MeshFormatError(where(lineno) + "malformed face");
        if (k != 3)
            throw NonTriangleFace(where(lineno) + "face has " + std::to_string(k) + " vertices");
        long long a = 0, b = 0, c = 0;
        std::string extra;
        if (!(in >> a >> b >> c) || (in >> extra))
            throw MeshFormatError(where(lineno) + "expected \"3 i j k\"");
        for (long long idx : {a, b, c})
            if (idx < 0 || idx >= nv)
                throw MeshFormatError(where(lineno) + "vertex index out of range");
        if (a == b || b == c || a == c)
            throw DegenerateTriangle(where(lineno) + "repeated vertex in face");
        faces[f] = {static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                    static_cast<std::size_t>(c)};
    }

    std::vector<double> areas(nfaces);
    double total_area = 0.0;
    for (std::size_t f = 0; f < nfaces; ++f) {
        const auto& [a, b, c] = faces[f];
        areas[f] = 0.5 * norm3(cross(sub(verts[b], verts[a]), sub(verts[c], verts[a])));
        total_area += areas[f];
    }
    const double mean_area = total_area / static_cast<double>(nfaces);
    for (std::size_t f = 0; f < nfaces; ++f)
        if (!(areas[f] >= 1e-14 * mean_area))
            throw DegenerateTriangle("face " + std::to_string(f) + " has (near) zero area");

    // Every undirected edge of a closed surface borders exactly two faces.
    std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
    for (const auto& face : faces)
        for (int e = 0; e < 3; ++e) {
            auto i = face[e], j = face[(e + 1) % 3];
            ++edge_use[{std::min(i, j), std::max(i, j)}];
        }
    for (const auto& [edge, count] : edge_use)
        if (count != 2)
            throw MeshFormatError("mesh is not a closed manifold surface (edge " +
                                  std::to_string(edge.first) + "-" +
                                  std::to_string(edge.second) + " used " +
                                  std::to_string(count) + " times)");

    std::vector<double> mass(nverts, 0.0);
    std::vector<Triplet> entries;
    entries.reserve(nfaces * 12);
    for (std::size_t f = 0; f < nfaces; ++f) {
        const auto& face = faces[f];
        for (int corner = 0; corner < 3; ++corner) {
            const auto i = face[corner];
            const auto j = face[(corner + 1) % 3];
            const auto k = face[(corner + 2) % 3];
            mass[i] += areas[f] / 3.0;
            // Angle at i is opposite edge (j, k).
            const Vec3 e1 = sub(verts[j], verts[i]);
            const Vec3 e2 = sub(verts[k], verts[i]);
            const double w = 0.5 * dot3(e1, e2) / norm3(cross(e1, e2));  // cot(angle) / 2
            entries.push_back({j, k, -w});
            entries.push_back({k, j, -w});
            entries.push_back({j, j, w});
            entries.push_back({k, k, w});
        }
    }
    for (std::size_t i = 0; i < nverts; ++i)
        if (!(mass[i] > 0.0))
            throw MeshFormatError("vertex " + std::to_string(i) + " belongs to no face");

    std::vector<double> coords(nverts * 3);
    for (std::size_t i = 0; i < nverts; ++i)
        for (int k = 0; k < 3; ++k)
            coords[i * 3 + k] = verts[i][k];

    return DiscreteManifold(2, 3, std::move(coords), std::move(mass),
                            CsrMatrix::from_triplets(nverts, std::move(entries)), label,
                            std::vector<double>(3, 0.0));
}

DiscreteManifold load_off_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshFormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_off_mesh(buf.str(), path.filename().string());
}

}  // namespace curvflow
