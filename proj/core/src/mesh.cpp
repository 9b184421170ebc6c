#include "c0ipg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "c0ipg/quadrature.hpp"

namespace c0ipg {

namespace {

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32U) | hi;
}

Real signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

Domain parse_domain(std::string_view name)
{
    if (name == "slit") {
        return Domain::kSlit;
    }
    if (name == "lshape") {
        return Domain::kLShape;
    }
    if (name == "unit-square") {
        return Domain::kUnitSquare;
    }
    throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

std::string_view to_string(Domain domain)
{
    switch (domain) {
    case Domain::kSlit:
        return "slit";
    case Domain::kLShape:
        return "lshape";
    case Domain::kUnitSquare:
        return "unit-square";
    }
    return "?";
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri.v) {
            if (v < 0 || v >= num_vertices()) {
                throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                            " references vertex out of range");
            }
        }
        if (signed_area(vertex(tri.v[0]), vertex(tri.v[1]), vertex(tri.v[2])) <= 0.0) {
            throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                        " has non-positive signed area");
        }
    }
    build_faces();
}

void Mesh::build_faces()
{
    faces_.clear();
    triangle_faces_.assign(triangles_.size(), {-1, -1, -1});
    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(3 * triangles_.size());
    for (int t = 0; t < num_triangles(); ++t) {
        const auto& tri = triangle(t);
        for (int k = 0; k < 3; ++k) {
            const int a = tri.v[static_cast<std::size_t>(k)];
            const int b = tri.v[static_cast<std::size_t>((k + 1) % 3)];
            auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_faces());
            if (inserted) {
                Face f;
                f.vertices = {a, b};
                f.minus = t;
                const Point d = vertex(b) - vertex(a);
                f.length = norm(d);
                f.normal = {d.y / f.length, -d.x / f.length};
                faces_.push_back(f);
            } else {
                Face& f = faces_[static_cast<std::size_t>(it->second)];
                if (f.plus >= 0) {
                    throw std::invalid_argument("Mesh: edge shared by more than two triangles");
                }
                f.plus = t;
                f.kind = FaceKind::kInterior;
            }
            triangle_faces_[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = it->second;
        }
    }
}

std::array<Point, 3> Mesh::corners(int t) const
{
    const auto& tri = triangle(t);
    return {vertex(tri.v[0]), vertex(tri.v[1]), vertex(tri.v[2])};
}

Real Mesh::area(int t) const
{
    const auto p = corners(t);
    return signed_area(p[0], p[1], p[2]);
}

Real Mesh::diameter(int t) const
{
    const auto p = corners(t);
    return std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
}

Real Mesh::min_angle(int t) const
{
    const auto p = corners(t);
    Real result = std::numbers::pi;
    for (int k = 0; k < 3; ++k) {
        const Point e1 = p[static_cast<std::size_t>((k + 1) % 3)] - p[static_cast<std::size_t>(k)];
        const Point e2 = p[static_cast<std::size_t>((k + 2) % 3)] - p[static_cast<std::size_t>(k)];
        result = std::min(result, std::atan2(std::abs(cross(e1, e2)), dot(e1, e2)));
    }
    return result;
}

Real Mesh::max_diameter() const
{
    Real h = 0.0;
    for (int t = 0; t < num_triangles(); ++t) {
        h = std::max(h, diameter(t));
    }
    return h;
}

Real Mesh::total_area() const
{
    Real a = 0.0;
    for (int t = 0; t < num_triangles(); ++t) {
        a += area(t);
    }
    return a;
}

Real Mesh::global_min_angle() const
{
    Real a = std::numbers::pi;
    for (int t = 0; t < num_triangles(); ++t) {
        a = std::min(a, min_angle(t));
    }
    return a;
}

Mesh make_uniform(Domain domain, Real h0)
{
    if (!(h0 > 0.0)) {
        throw SizingError("make_uniform: h0 must be positive");
    }
    // Cells of side h0 / sqrt(2), each split into two right triangles whose
    // hypotenuse (the refinement edge) is the shared diagonal.
    const Real cell = h0 / std::numbers::sqrt2;
    const Real per_unit = 1.0 / cell;
    const long n = std::lround(per_unit);
    if (n < 1 || std::abs(per_unit - static_cast<Real>(n)) > 1e-9 * per_unit) {
        throw SizingError("make_uniform: h0 = " + std::to_string(h0) +
                          " does not divide the domain edge lengths");
    }
    if (domain == Domain::kSlit && n % 2 != 0) {
        throw SizingError("make_uniform: slit domain needs an even number of cells per side");
    }

    int x0 = 0;
    int y0 = 0;
    int nx = static_cast<int>(n);
    int ny = static_cast<int>(n);
    if (domain == Domain::kLShape) {
        x0 = -static_cast<int>(n);
        y0 = -static_cast<int>(n);
        nx = ny = 2 * static_cast<int>(n);
    }
    const int half = static_cast<int>(n) / 2;

    auto cell_present = [&](int i, int j) {
        if (domain != Domain::kLShape) {
            return true;
        }
        // Cell with lower-left grid corner (x0 + i, y0 + j) in units of `cell`.
        return !(x0 + i >= 0 && y0 + j < 0);
    };

    const int stride = nx + 1;
    std::vector<int> grid_id(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
    std::vector<int> slit_copy(static_cast<std::size_t>(nx + 1), -1);
    std::vector<Point> vertices;

    auto grid_point = [&](int i, int j) {
        return Point{static_cast<Real>(x0 + i) * cell, static_cast<Real>(y0 + j) * cell};
    };
    auto vertex_id = [&](int i, int j, bool below_slit) {
        if (domain == Domain::kSlit && below_slit && j == half && i > half) {
            int& id = slit_copy[static_cast<std::size_t>(i)];
            if (id < 0) {
                id = static_cast<int>(vertices.size());
                vertices.push_back(grid_point(i, j));
            }
            return id;
        }
        int& id = grid_id[static_cast<std::size_t>(j * stride + i)];
        if (id < 0) {
            id = static_cast<int>(vertices.size());
            vertices.push_back(grid_point(i, j));
        }
        return id;
    };

    std::vector<Triangle> triangles;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!cell_present(i, j)) {
                continue;
            }
            const bool below = (j < half);
            const int p00 = vertex_id(i, j, below);
            const int p10 = vertex_id(i + 1, j, below);
            const int p11 = vertex_id(i + 1, j + 1, below);
            const int p01 = vertex_id(i, j + 1, below);
            // Right angle first: it is the newest vertex.
            triangles.push_back({{p10, p11, p00}, 0, -1});
            triangles.push_back({{p01, p00, p11}, 0, -1});
        }
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        triangles[t].parent = static_cast<int>(t);
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh refine(const Mesh& mesh, std::span<const int> marked)
{
    const int nt = mesh.num_triangles();
    std::vector<char> face_marked(static_cast<std::size_t>(mesh.num_faces()), 0);
    std::vector<int> worklist;
    auto mark_face = [&](int f) {
        if (face_marked[static_cast<std::size_t>(f)] == 0) {
            face_marked[static_cast<std::size_t>(f)] = 1;
            worklist.push_back(f);
        }
    };
    for (int t : marked) {
        if (t < 0 || t >= nt) {
            throw std::out_of_range("refine: marked triangle id out of range");
        }
        mark_face(mesh.triangle_faces(t)[1]);
    }
    // Closure: any triangle with a marked edge must also split its refinement edge.
    while (!worklist.empty()) {
        const int f = worklist.back();
        worklist.pop_back();
        const Face& face = mesh.face(f);
        for (int t : {face.minus, face.plus}) {
            if (t >= 0) {
                mark_face(mesh.triangle_faces(t)[1]);
            }
        }
    }

    std::vector<Point> vertices = mesh.vertices();
    std::unordered_map<std::uint64_t, int> midpoint;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (face_marked[static_cast<std::size_t>(f)] == 0) {
            continue;
        }
        const Face& face = mesh.face(f);
        const Point m = 0.5 * (mesh.vertex(face.vertices[0]) + mesh.vertex(face.vertices[1]));
        midpoint.emplace(edge_key(face.vertices[0], face.vertices[1]),
                         static_cast<int>(vertices.size()));
        vertices.push_back(m);
    }

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(nt) + 2 * midpoint.size());
    auto bisect = [&](auto&& self, const Triangle& tri) -> void {
        const auto it = midpoint.find(edge_key(tri.v[1], tri.v[2]));
        if (it == midpoint.end()) {
            triangles.push_back(tri);
            return;
        }
        const int a = tri.v[0];
        const int b = tri.v[1];
        const int c = tri.v[2];
        const int m = it->second;
        self(self, Triangle{{m, a, b}, tri.generation + 1, tri.parent});
        self(self, Triangle{{m, c, a}, tri.generation + 1, tri.parent});
    };
    for (int t = 0; t < nt; ++t) {
        Triangle tri = mesh.triangle(t);
        tri.parent = t;
        bisect(bisect, tri);
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh refine_all(const Mesh& mesh)
{
    std::vector<int> all(static_cast<std::size_t>(mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        all[static_cast<std::size_t>(t)] = t;
    }
    return refine(mesh, all);
}

std::vector<FaceQuadraturePoint> face_quadrature_points(Point a, Point b, int n)
{
    if (n < 1) {
        throw std::invalid_argument("face_quadrature_points: order must be >= 1");
    }
    const LineRule& rule = gauss_legendre(n);
    const Real length = norm(b - a);
    std::vector<FaceQuadraturePoint> out;
    out.reserve(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        out.push_back({a + rule.points[q] * (b - a), rule.weights[q] * length});
    }
    return out;
}

std::vector<FaceQuadraturePoint> face_quadrature_points(const Mesh& mesh, const Face& face, int n)
{
    return face_quadrature_points(mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]), n);
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
    out << std::setprecision(17);
    for (const auto& p : mesh.vertices()) {
        out << p.x << ' ' << p.y << '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    }
}

void write_mesh(const std::string& path, const Mesh& mesh)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_mesh: cannot open '" + path + "'");
    }
    write_mesh(out, mesh);
}

}  // namespace c0ipg
