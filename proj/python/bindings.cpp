#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rangemax/index_file.hpp"
#include "rangemax/influence.hpp"
#include "rangemax/text_io.hpp"

namespace py = pybind11;
using namespace rangemax;

namespace {

// None on either bound means an open side
QueryRect rect_of(std::optional<Coord> x1, std::optional<Coord> y1, std::optional<Coord> x2,
                  std::optional<Coord> y2) {
    return {x1.value_or(kOpenLow), x2.value_or(kOpenHigh), y1.value_or(kOpenLow),
            y2.value_or(kOpenHigh)};
}

py::object answer(const std::optional<Candidate>& c) {
    if (!c) return py::none();
    return py::make_tuple(c->x, c->y, c->priority);
}

} // namespace

PYBIND11_MODULE(_rangemax, m) {
    m.doc() = "Orthogonal range-maximum index";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

    py::class_<PointSet>(m, "PointSet")
        .def(py::init<std::vector<std::uint32_t>, std::vector<std::uint32_t>>(),
             py::arg("y_by_x"), py::arg("priority_by_x"))
        .def_static("random", &random_point_set, py::arg("n"), py::arg("seed") = 1)
        .def_static("from_text", [](const std::string& s) {
            std::istringstream in(s);
            return read_points(in);
        })
        .def("to_text", [](const PointSet& ps) {
            std::ostringstream out;
            write_points(out, ps);
            return out.str();
        })
        .def("__len__", &PointSet::size)
        .def_property_readonly("y_by_x", &PointSet::upsilon)
        .def_property_readonly("priority_by_x", &PointSet::pi)
        .def("brute_force", [](const PointSet& ps, std::optional<Coord> x1, std::optional<Coord> y1,
                               std::optional<Coord> x2, std::optional<Coord> y2) {
            return answer(brute_force_max(ps, rect_of(x1, y1, x2, y2)));
        }, py::arg("x1") = py::none(), py::arg("y1") = py::none(), py::arg("x2") = py::none(),
           py::arg("y2") = py::none())
        .def("entropy_code_bits", [](const PointSet& ps) {
            return encode_priorities(ps).bit_length();
        });

    py::class_<RangeMaxTree>(m, "Index")
        .def_static("build", [](const PointSet& ps, std::uint32_t lambda_override,
                                std::uint32_t base_threshold) {
            BuildConfig cfg;
            cfg.lambda_override = lambda_override;
            cfg.base_threshold = base_threshold;
            py::gil_scoped_release release;
            return RangeMaxTree::build(ps, cfg);
        }, py::arg("points"), py::arg("lambda_override") = 0, py::arg("base_threshold") = 0)
        .def_static("load", [](const std::string& path) { return load_index(path); })
        .def_static("from_bytes", [](const py::bytes& b) {
            std::string s = b;
            std::vector<std::uint8_t> v(s.begin(), s.end());
            return read_index(v);
        })
        .def("save", [](const RangeMaxTree& t, const std::string& path) { save_index(t, path); })
        .def("to_bytes", [](const RangeMaxTree& t) {
            auto v = write_index(t).bytes;
            return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
        })
        .def("__len__", &RangeMaxTree::size)
        .def_property_readonly("depth", &RangeMaxTree::depth)
        .def_property_readonly("padded_size", &RangeMaxTree::padded_size)
        .def("query", [](const RangeMaxTree& t, std::optional<Coord> x1, std::optional<Coord> y1,
                         std::optional<Coord> x2, std::optional<Coord> y2) {
            return answer(t.query(rect_of(x1, y1, x2, y2)));
        }, py::arg("x1") = py::none(), py::arg("y1") = py::none(), py::arg("x2") = py::none(),
           py::arg("y2") = py::none(),
           "Highest-priority point (x, y, priority) in the inclusive rectangle, or None.")
        .def("query_stats", [](const RangeMaxTree& t, std::optional<Coord> x1,
                               std::optional<Coord> y1, std::optional<Coord> x2,
                               std::optional<Coord> y2) {
            QueryStats st;
            auto r = t.query(rect_of(x1, y1, x2, y2), &st);
            py::dict d;
            d["answer"] = answer(r);
            d["candidates"] = st.candidates;
            d["visits"] = st.visits;
            d["two_sided"] = st.two_sided;
            d["matrix"] = st.matrix;
            d["leaf_scans"] = st.leaf_scans;
            return d;
        }, py::arg("x1") = py::none(), py::arg("y1") = py::none(), py::arg("x2") = py::none(),
           py::arg("y2") = py::none())
        .def("space_report", [](const RangeMaxTree& t, const std::string& format) {
            SpaceReport rep = space_report(t);
            return format == "jsonl" ? rep.json_lines() : rep.csv();
        }, py::arg("format") = "csv")
        .def("__eq__", [](const RangeMaxTree& a, const RangeMaxTree& b) { return a == b; });
}
