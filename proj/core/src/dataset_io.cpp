#include "polyart/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "polyart/version.hpp"

namespace polyart {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    return std::move(buf).str();
}

Box box_from_json(const json& arr, const std::string& locus) {
    if (!arr.is_array() || arr.size() != 4) {
        throw ParseError(locus + ": box must be an array of 4 numbers");
    }
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw ParseError(locus + ": box coordinate is not a number");
        }
    }
    try {
        return Box(arr[0].get<double>(), arr[1].get<double>(),
                   arr[2].get<double>(), arr[3].get<double>());
    } catch (const InvariantError& e) {
        throw InvariantError(locus + ": " + e.what());
    }
}

json box_to_json(const Box& b) {
    return json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

double score_from_json(const json& obj, const std::string& locus) {
    if (!obj.contains("score") || !obj["score"].is_number()) {
        throw ParseError(locus + ": missing numeric 'score'");
    }
    return obj["score"].get<double>();
}

FrameRecord frame_from_json(const json& jf, std::size_t index) {
    const std::string locus = "frame " + std::to_string(index);
    if (!jf.is_object()) throw ParseError(locus + ": not an object");
    for (const char* key : {"frame_id", "width", "height", "gt_polyps",
                            "pred_polyps", "artifacts"}) {
        if (!jf.contains(key)) {
            throw ParseError(locus + ": missing key '" + key + "'");
        }
    }
    FrameRecord f;
    if (!jf["frame_id"].is_string()) {
        throw ParseError(locus + ": 'frame_id' is not a string");
    }
    f.frame_id = jf["frame_id"].get<std::string>();
    const std::string id_locus = locus + " (id '" + f.frame_id + "')";
    if (!jf["width"].is_number_integer() ||
        !jf["height"].is_number_integer()) {
        throw ParseError(id_locus + ": width/height must be integers");
    }
    try {
        f.image = ImageSize(jf["width"].get<int>(), jf["height"].get<int>());
    } catch (const InvariantError& e) {
        throw InvariantError(id_locus + ": " + e.what());
    }
    std::size_t i = 0;
    for (const auto& jb : jf["gt_polyps"]) {
        f.gt_polyps.push_back(box_from_json(
            jb, id_locus + ": gt_polyps[" + std::to_string(i++) + "]"));
    }
    i = 0;
    for (const auto& jd : jf["pred_polyps"]) {
        const std::string d_locus =
            id_locus + ": pred_polyps[" + std::to_string(i++) + "]";
        if (!jd.is_object() || !jd.contains("box")) {
            throw ParseError(d_locus + ": expected {box, score}");
        }
        try {
            f.pred_polyps.emplace_back(box_from_json(jd["box"], d_locus),
                                       score_from_json(jd, d_locus));
        } catch (const InvariantError& e) {
            throw InvariantError(d_locus + ": " + e.what());
        }
    }
    i = 0;
    for (const auto& jd : jf["artifacts"]) {
        const std::string d_locus =
            id_locus + ": artifacts[" + std::to_string(i++) + "]";
        if (!jd.is_object() || !jd.contains("box") || !jd.contains("class")) {
            throw ParseError(d_locus + ": expected {box, class, score}");
        }
        if (!jd["class"].is_number_integer()) {
            throw ParseError(d_locus + ": 'class' must be an integer");
        }
        ArtifactClass cls;
        try {
            cls = artifact_class_from_code(jd["class"].get<int>());
        } catch (const ParseError& e) {
            throw ParseError(d_locus + ": " + e.what());
        }
        try {
            f.artifacts.emplace_back(box_from_json(jd["box"], d_locus),
                                     score_from_json(jd, d_locus), cls);
        } catch (const InvariantError& e) {
            throw InvariantError(d_locus + ": " + e.what());
        }
    }
    return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& text, const std::string& locus) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first != last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(locus + ": '" + text + "' is not a number");
    }
    return value;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    switch (format) {
        case DatasetFormat::CanonicalJson:
            return load_dataset_json(path);
        case DatasetFormat::Csv:
            return load_dataset_csv(path);
    }
    throw ConfigError("unknown dataset format");
}

Dataset load_dataset_json(const std::filesystem::path& path) {
    return dataset_from_json_string(read_file(path), path.string());
}

Dataset dataset_from_json_string(std::string_view text,
                                 std::string_view source_name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source_name) + ": " + e.what());
    }
    if (!root.is_object() || !root.contains("schema") ||
        !root.contains("name") || !root.contains("frames")) {
        throw ParseError(std::string(source_name) +
                         ": expected {schema, name, frames}");
    }
    if (!root["schema"].is_number_integer() ||
        root["schema"].get<int>() != kDatasetSchemaVersion) {
        throw ParseError(std::string(source_name) +
                         ": unsupported schema version");
    }
    Dataset d;
    d.name = root["name"].get<std::string>();
    if (root.contains("mode")) {
        d.label_mode =
            label_mode_from_string(root["mode"].get<std::string>());
    }
    if (!root["frames"].is_array()) {
        throw ParseError(std::string(source_name) +
                         ": 'frames' is not an array");
    }
    std::size_t i = 0;
    d.frames.reserve(root["frames"].size());
    for (const auto& jf : root["frames"]) {
        d.frames.push_back(frame_from_json(jf, i++));
    }
    validate(d);
    return d;
}

Dataset load_dataset_csv(const std::filesystem::path& path,
                         ImageSize frame_size) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    Dataset d;
    d.name = path.stem().string();
    std::unordered_map<std::string, std::size_t> frame_index;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::string locus =
            path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 7) {
            throw ParseError(locus + ": expected 7 fields, got " +
                             std::to_string(fields.size()));
        }
        if (line_no == 1 && fields[0] == "frame_id") continue;  // header

        const std::string& frame_id = fields[0];
        const std::string& label = fields[1];
        Box box = [&] {
            try {
                return Box(parse_number(fields[3], locus),
                           parse_number(fields[4], locus),
                           parse_number(fields[5], locus),
                           parse_number(fields[6], locus));
            } catch (const InvariantError& e) {
                throw InvariantError(locus + ": " + e.what());
            }
        }();

        auto it = frame_index.find(frame_id);
        if (it == frame_index.end()) {
            it = frame_index.emplace(frame_id, d.frames.size()).first;
            FrameRecord f;
            f.frame_id = frame_id;
            f.image = frame_size;
            d.frames.push_back(std::move(f));
        }
        FrameRecord& frame = d.frames[it->second];

        try {
            if (label == "polyp_gt") {
                frame.gt_polyps.push_back(box);
            } else if (label == "polyp") {
                frame.pred_polyps.emplace_back(box,
                                               parse_number(fields[2], locus));
            } else {
                frame.artifacts.emplace_back(
                    box, parse_number(fields[2], locus),
                    artifact_class_from_string(label));
            }
        } catch (const InvariantError& e) {
            throw InvariantError(locus + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(locus + ": " + e.what());
        }
    }
    validate(d);
    return d;
}

std::string dataset_to_json_string(const Dataset& d) {
    json root;
    root["schema"] = kDatasetSchemaVersion;
    root["name"] = d.name;
    if (d.label_mode.has_value()) {
        root["mode"] = std::string(to_string(*d.label_mode));
    }
    json frames = json::array();
    for (const FrameRecord& f : d.frames) {
        json jf;
        jf["frame_id"] = f.frame_id;
        jf["width"] = f.image.width;
        jf["height"] = f.image.height;
        json gts = json::array();
        for (const Box& b : f.gt_polyps) gts.push_back(box_to_json(b));
        jf["gt_polyps"] = std::move(gts);
        json preds = json::array();
        for (const Detection& det : f.pred_polyps) {
            preds.push_back({{"box", box_to_json(det.box)},
                             {"score", det.score}});
        }
        jf["pred_polyps"] = std::move(preds);
        json arts = json::array();
        for (const Detection& det : f.artifacts) {
            arts.push_back({{"box", box_to_json(det.box)},
                            {"class", static_cast<int>(*det.artifact_class)},
                            {"score", det.score}});
        }
        jf["artifacts"] = std::move(arts);
        frames.push_back(std::move(jf));
    }
    root["frames"] = std::move(frames);
    return root.dump(2) + "\n";
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << dataset_to_json_string(d);
    if (!out) {
        throw IoError("write failure on '" + path.string() + "'");
    }
}

}  // namespace polyart
