#include "arrowqp/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "arrowqp/errors.hpp"

namespace arrowqp
{

namespace
{

using json = nlohmann::json;

constexpr const char* problem_format = "arrowqp-problem";
constexpr const char* solution_format = "arrowqp-solution";

json vector_json(const Vec& v)
{
    json out = json::array();
    for (isize i = 0; i < v.size(); i++) out.push_back(v[i]);
    return out;
}

json sparse_json(const SparseMat& M)
{
    json triplets = json::array();
    for (isize j = 0; j < M.outerSize(); j++) {
        for (SparseMat::InnerIterator it(M, j); it; ++it) {
            triplets.push_back(json::array({it.row(), j, it.value()}));
        }
    }
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"nnz", M.nonZeros()}, {"triplets", std::move(triplets)}};
}

const json& field(const json& doc, const char* name)
{
    const auto it = doc.find(name);
    if (it == doc.end()) throw ParseError(std::string("missing field '") + name + "'");
    return *it;
}

isize read_dim(const json& doc, const char* name)
{
    const json& v = field(doc, name);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(std::string("field '") + name + "' must be a non-negative integer");
    }
    return static_cast<isize>(v.get<long long>());
}

Vec read_vector(const json& doc, const char* name, isize size)
{
    const json& v = field(doc, name);
    if (!v.is_array()) throw ParseError(std::string("field '") + name + "' must be an array");
    if (static_cast<isize>(v.size()) != size) {
        throw ParseError(std::string("field '") + name + "' has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(size));
    }
    Vec out(size);
    for (isize i = 0; i < size; i++) {
        if (!v[i].is_number()) throw ParseError(std::string("field '") + name + "' holds a non-number");
        out[i] = v[i].get<double>();
    }
    return out;
}

SparseMat read_sparse(const json& doc, const char* name, isize rows, isize cols, bool lower)
{
    const json& M = field(doc, name);
    if (!M.is_object()) throw ParseError(std::string("field '") + name + "' must be an object");
    if (read_dim(M, "rows") != rows || read_dim(M, "cols") != cols) {
        throw ParseError(std::string("matrix '") + name + "' has inconsistent dimensions");
    }
    const json& trip = field(M, "triplets");
    if (!trip.is_array()) throw ParseError(std::string("matrix '") + name + "' triplets must be an array");
    if (M.contains("nnz") && read_dim(M, "nnz") != static_cast<isize>(trip.size())) {
        throw ParseError(std::string("matrix '") + name + "' nnz does not match its triplets");
    }
    std::vector<Triplet> entries;
    entries.reserve(trip.size());
    for (const json& t : trip) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
            !t[2].is_number()) {
            throw ParseError(std::string("matrix '") + name + "' has a malformed triplet");
        }
        const long long i = t[0].get<long long>();
        const long long j = t[1].get<long long>();
        if (i < 0 || j < 0 || i >= rows || j >= cols) {
            throw ParseError(std::string("matrix '") + name + "' has an index out of range");
        }
        if (lower && i < j) throw ParseError(std::string("matrix '") + name + "' must be lower triangular");
        entries.emplace_back(static_cast<int>(i), static_cast<int>(j), t[2].get<double>());
    }
    SparseMat out(rows, cols);
    out.setFromTriplets(entries.begin(), entries.end());
    out.makeCompressed();
    return out;
}

json parse(std::istream& is)
{
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace

void write_problem(std::ostream& os, const ProblemFile& pf)
{
    const GeneralQP& qp = pf.qp;
    json config = json::object();
    for (const auto& [key, value] : pf.meta.config) config[key] = value;
    json doc = json::object();
    doc["format"] = problem_format;
    doc["version"] = 1;
    doc["meta"] = json{{"family", pf.meta.family}, {"seed", pf.meta.seed}, {"config", config}};
    doc["n"] = qp.n;
    doc["p"] = qp.p;
    doc["m"] = qp.m;
    doc["P"] = sparse_json(qp.P);
    doc["c"] = vector_json(qp.c);
    doc["A"] = sparse_json(qp.A);
    doc["b"] = vector_json(qp.b);
    doc["G"] = sparse_json(qp.G);
    doc["h"] = vector_json(qp.h);
    if (pf.structure) {
        doc["structure"] = json{{"block_sizes", pf.structure->block_sizes()},
                                {"arrow_width", pf.structure->arrow_width()}};
    }
    os << doc.dump() << '\n';
}

ProblemFile read_problem(std::istream& is)
{
    const json doc = parse(is);
    if (!doc.is_object()) throw ParseError("problem document must be a JSON object");
    if (!doc.contains("format") || doc["format"] != problem_format) throw ParseError("not an arrowqp problem document");
    if (!doc.contains("version") || doc["version"] != 1) throw ParseError("unsupported problem document version");

    ProblemFile pf;
    try {
        if (doc.contains("meta")) {
            const json& meta = doc["meta"];
            pf.meta.family = meta.value("family", std::string());
            pf.meta.seed = meta.value("seed", std::uint64_t{0});
            if (meta.contains("config")) {
                for (const auto& [key, value] : meta["config"].items()) {
                    pf.meta.config.emplace_back(key, value.get<double>());
                }
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed meta section: ") + e.what());
    }

    const isize n = read_dim(doc, "n");
    const isize p = read_dim(doc, "p");
    const isize m = read_dim(doc, "m");
    SparseMat P = read_sparse(doc, "P", n, n, true);
    Vec c = read_vector(doc, "c", n);
    SparseMat A = read_sparse(doc, "A", p, n, false);
    Vec b = read_vector(doc, "b", p);
    SparseMat G = read_sparse(doc, "G", m, n, false);
    Vec h = read_vector(doc, "h", m);
    pf.qp = GeneralQP(std::move(P), std::move(c), std::move(A), std::move(b), std::move(G), std::move(h));

    if (doc.contains("structure")) {
        try {
            const json& s = doc["structure"];
            auto sizes = s.at("block_sizes").get<std::vector<isize>>();
            const isize arrow = s.at("arrow_width").get<isize>();
            pf.structure = BlockStructure(std::move(sizes), arrow);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed structure section: ") + e.what());
        } catch (const Error& e) {
            throw ParseError(std::string("invalid structure section: ") + e.what());
        }
        if (pf.structure->n() != n) throw ParseError("structure section does not match n");
    }
    return pf;
}

ProblemFile read_problem_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_problem(in);
}

void write_problem_file(const std::string& path, const ProblemFile& problem)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_problem(out, problem);
}

void write_solution(std::ostream& os, const Solution& sol, bool include_timings)
{
    json doc = json::object();
    doc["format"] = solution_format;
    doc["version"] = 1;
    doc["status"] = to_string(sol.status);
    doc["iterations"] = sol.iterations;
    doc["objective"] = sol.objective;
    doc["primal_residual"] = sol.primal_residual;
    doc["dual_residual"] = sol.dual_residual;
    doc["x"] = vector_json(sol.x);
    doc["s"] = vector_json(sol.s);
    doc["y"] = vector_json(sol.y);
    doc["z"] = vector_json(sol.z);
    if (include_timings) {
        const SolveTimings& t = sol.timings;
        doc["timings"] = json{{"setup", t.setup},   {"assembly", t.assembly}, {"factorize", t.factorize},
                              {"kkt_solve", t.kkt_solve}, {"other", t.other},   {"total", t.total}};
    }
    os << doc.dump(1) << '\n';
}

Solution read_solution(std::istream& is)
{
    const json doc = parse(is);
    if (!doc.is_object() || !doc.contains("format") || doc["format"] != solution_format) {
        throw ParseError("not an arrowqp solution document");
    }
    auto vec = [&](const char* name) {
        const json& v = field(doc, name);
        return read_vector(doc, name, v.is_array() ? static_cast<isize>(v.size()) : -1);
    };
    Solution sol;
    sol.x = vec("x");
    if (doc.contains("s")) sol.s = vec("s");
    if (doc.contains("y")) sol.y = vec("y");
    if (doc.contains("z")) sol.z = vec("z");
    return sol;
}

Solution read_solution_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_solution(in);
}

} // namespace arrowqp
