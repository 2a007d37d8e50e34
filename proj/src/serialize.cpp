#include "relusynth/serialize.hpp"

#include <fstream>

namespace relusynth {

using nlohmann::json;

json serialize(const Network& net) {
    json doc;
    doc["scalar"] = net.kind().name();
    doc["dims"] = net.dims();
    json layers = json::array();
    for (const auto& l : net.layers()) {
        json W = json::array();
        for (std::size_t i = 0; i < l.W.rows(); ++i) {
            std::vector<std::string> row(l.W.cols(), Scalar::zero(net.kind()).to_string());
            for (const auto& e : l.W.row(i)) row[e.col] = e.value.to_string();
            W.push_back(std::move(row));
        }
        json v = json::array();
        for (const auto& s : l.v) v.push_back(s.to_string());
        layers.push_back({{"W", std::move(W)}, {"v", std::move(v)}});
    }
    doc["layers"] = std::move(layers);
    return doc;
}

namespace {

Scalar read_scalar(const json& j, const ScalarKind& k) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>(), k);
    if (j.is_number_integer()) return Scalar::from_rational(mpq_class(j.get<long>()), k);
    if (j.is_number()) return Scalar::from_double(j.get<double>(), k);
    throw SchemaError("scalar entry must be a string or number");
}

}  // namespace

Network deserialize(const json& doc) {
    try {
        if (!doc.is_object()) throw SchemaError("network document must be an object");
        for (const char* key : {"scalar", "dims", "layers"})
            if (!doc.contains(key)) throw SchemaError(std::string("missing field: ") + key);
        ScalarKind k = ScalarKind::parse(doc.at("scalar").get<std::string>());
        const json& dims = doc.at("dims");
        const json& layers = doc.at("layers");
        if (!dims.is_array() || !layers.is_array()) throw SchemaError("dims and layers must be arrays");
        if (dims.size() != layers.size() + 1) throw SchemaError("dims length must equal layers + 1");
        std::vector<std::size_t> N;
        for (const auto& d : dims) {
            if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) throw SchemaError("dims must be positive integers");
            N.push_back(d.get<std::size_t>());
        }
        std::vector<Layer> out;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const json& l = layers[i];
            const json& W = l.at("W");
            const json& v = l.at("v");
            if (!W.is_array() || W.size() != N[i + 1] || !v.is_array() || v.size() != N[i + 1])
                throw SchemaError("layer " + std::to_string(i) + ": shape inconsistent with dims");
            Matrix::Builder b(N[i + 1], N[i], k);
            std::vector<Scalar> bias;
            for (std::size_t r = 0; r < N[i + 1]; ++r) {
                if (!W[r].is_array() || W[r].size() != N[i])
                    throw SchemaError("layer " + std::to_string(i) + ": row length inconsistent with dims");
                for (std::size_t c = 0; c < N[i]; ++c) b.add(r, c, read_scalar(W[r][c], k));
                bias.push_back(read_scalar(v[r], k));
            }
            out.push_back({b.build(), std::move(bias)});
        }
        return Network(k, std::move(out));
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(e.what());
    }
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << serialize(net).dump() << '\n';
}

Network load_network(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot read " + path);
    json doc;
    try {
        is >> doc;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    return deserialize(doc);
}

}  // namespace relusynth
