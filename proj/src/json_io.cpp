#include "fidlab/json_io.hpp"

#include <fstream>

namespace fidlab {

namespace {

const Json& require_field(const Json& j, const char* name, const std::string& ctx) {
  if (!j.is_object()) {
    throw ParseError(ctx + ": expected an object");
  }
  auto it = j.find(name);
  if (it == j.end()) {
    throw ParseError(ctx + "." + name + ": missing field");
  }
  return *it;
}

Complex complex_from_json(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(ctx + ": expected [re, im]");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Matrix matrix_from_json(const Json& j, int dim, const std::string& ctx) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ParseError(ctx + ": expected " + std::to_string(dim) + " rows");
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ParseError(ctx + "[" + std::to_string(r) + "]: expected " +
                       std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      m(r, c) = complex_from_json(row[c], ctx + "[" + std::to_string(r) + "][" +
                                              std::to_string(c) + "]");
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json algebra_to_json(const TracialAlgebra& algebra) {
  Json blocks = Json::array();
  for (const auto& b : algebra.blocks()) {
    blocks.push_back(Json{{"dim", b.dim}, {"weight", b.weight}});
  }
  return Json{{"blocks", blocks}};
}

TracialAlgebra algebra_from_json(const Json& j, const std::string& context) {
  const Json& blocks = require_field(j, "blocks", context);
  if (!blocks.is_array() || blocks.empty()) {
    throw ParseError(context + ".blocks: expected a nonempty array");
  }
  std::vector<AlgebraBlock> out;
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string ctx = context + ".blocks[" + std::to_string(i) + "]";
    const Json& dim = require_field(blocks[i], "dim", ctx);
    const Json& weight = require_field(blocks[i], "weight", ctx);
    if (!dim.is_number_integer() || dim.get<int>() < 1) {
      throw ParseError(ctx + ".dim: expected a positive integer");
    }
    if (!weight.is_number() || !(weight.get<double>() > 0.0)) {
      throw ParseError(ctx + ".weight: expected a positive number");
    }
    out.push_back({dim.get<int>(), weight.get<double>()});
  }
  return TracialAlgebra(std::move(out));
}

Json element_blocks_to_json(const AlgebraElement& x) {
  Json blocks = Json::array();
  for (int b = 0; b < x.block_count(); ++b) blocks.push_back(matrix_to_json(x.block(b)));
  return blocks;
}

AlgebraElement element_blocks_from_json(const Json& j, const TracialAlgebra& algebra,
                                        const std::string& context) {
  if (!j.is_array() || static_cast<int>(j.size()) != algebra.block_count()) {
    throw ParseError(context + ": expected " + std::to_string(algebra.block_count()) +
                     " blocks");
  }
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra.block_count(); ++b) {
    blocks.push_back(matrix_from_json(j[b], algebra.block_dim(b),
                                      context + "[" + std::to_string(b) + "]"));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

Json element_to_json(const AlgebraElement& x) {
  return Json{{"algebra", algebra_to_json(x.algebra())},
              {"blocks", element_blocks_to_json(x)}};
}

AlgebraElement element_from_json(const Json& j, const std::string& context) {
  TracialAlgebra algebra =
      algebra_from_json(require_field(j, "algebra", context), context + ".algebra");
  return element_blocks_from_json(require_field(j, "blocks", context), algebra,
                                  context + ".blocks");
}

Json channel_to_json(const KrausChannel& ch) {
  Json kraus = Json::array();
  for (const auto& a : ch.kraus()) kraus.push_back(element_blocks_to_json(a));
  return Json{{"algebra", algebra_to_json(ch.algebra())}, {"kraus", kraus}};
}

KrausChannel channel_from_json(const Json& j, const std::string& context) {
  TracialAlgebra algebra =
      algebra_from_json(require_field(j, "algebra", context), context + ".algebra");
  const Json& kraus = require_field(j, "kraus", context);
  if (!kraus.is_array() || kraus.empty()) {
    throw ParseError(context + ".kraus: expected a nonempty array");
  }
  std::vector<AlgebraElement> ops;
  for (size_t k = 0; k < kraus.size(); ++k) {
    ops.push_back(element_blocks_from_json(
        kraus[k], algebra, context + ".kraus[" + std::to_string(k) + "]"));
  }
  return KrausChannel(algebra, std::move(ops));
}

Json predual_to_json(const PredualMatrix& omega) {
  Json entries = Json::array();
  for (int i = 0; i < omega.n(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < omega.n(); ++j) {
      row.push_back(element_blocks_to_json(omega.entry(i, j).y));
    }
    entries.push_back(std::move(row));
  }
  return Json{{"n", omega.n()},
              {"algebra", algebra_to_json(omega.algebra())},
              {"entries", entries}};
}

PredualMatrix predual_from_json(const Json& j, const std::string& context) {
  const Json& n_field = require_field(j, "n", context);
  if (!n_field.is_number_integer() || n_field.get<int>() < 1) {
    throw ParseError(context + ".n: expected a positive integer");
  }
  const int n = n_field.get<int>();
  TracialAlgebra algebra =
      algebra_from_json(require_field(j, "algebra", context), context + ".algebra");
  const Json& entries = require_field(j, "entries", context);
  if (!entries.is_array() || static_cast<int>(entries.size()) != n) {
    throw ParseError(context + ".entries: expected " + std::to_string(n) + " rows");
  }
  std::vector<FunctionalRep> reps;
  for (int i = 0; i < n; ++i) {
    const Json& row = entries[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(context + ".entries[" + std::to_string(i) + "]: expected " +
                       std::to_string(n) + " entries");
    }
    for (int k = 0; k < n; ++k) {
      reps.push_back(FunctionalRep{element_blocks_from_json(
          row[k], algebra,
          context + ".entries[" + std::to_string(i) + "][" + std::to_string(k) + "]")});
    }
  }
  return PredualMatrix(n, algebra, std::move(reps));
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw ParseError(path + ": invalid JSON");
  }
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) {
    throw Error(path + ": cannot open file for writing");
  }
  out << j.dump(2) << "\n";
}

}  // namespace fidlab
