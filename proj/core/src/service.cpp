#include "tldc/service.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tldc/image.hpp"

namespace tldc {

struct PredictionService::Impl {
    Model model;
    std::string model_id;
    std::size_t max_body_bytes;
    httplib::Server server;
    std::thread worker;

    Impl(Model m, std::string id, std::size_t cap)
        : model(std::move(m)), model_id(std::move(id)), max_body_bytes(cap) {}
};

static std::string error_json(const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    return j.dump();
}

PredictionService::PredictionService(Model model, std::string model_id,
                                     std::size_t max_body_bytes)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(model_id),
                                   max_body_bytes)) {
    impl_->server.set_payload_max_length(impl_->max_body_bytes);
    impl_->server.Post("/predict", [this](const httplib::Request& req,
                                          httplib::Response& res) {
        try {
            std::vector<unsigned char> body(req.body.begin(), req.body.end());
            PredictionResponse answer = handle(body);
            res.status = 200;
            res.set_content(answer.to_json_text(), "application/json");
        } catch (const DataError& e) {
            res.status = 400;
            res.set_content(error_json(e.what()), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(error_json(e.what()), "application/json");
        }
    });
}

PredictionService::~PredictionService() { stop(); }

void PredictionService::run(const std::string& host, int port) {
    if (!impl_->server.listen(host.c_str(), port))
        throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

int PredictionService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host.c_str());
        if (bound <= 0) throw IoError("cannot bind a port on " + host);
    } else {
        if (!impl_->server.bind_to_port(host.c_str(), port))
            throw IoError("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void PredictionService::stop() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

PredictionResponse PredictionService::handle(
    const std::vector<unsigned char>& body) {
    if (body.empty()) throw DataError("empty request body");
    Tensor img = decode_image(body, static_cast<int>(impl_->model.config().input_h),
                              static_cast<int>(impl_->model.config().input_w));
    return predict_image(impl_->model, img, impl_->model_id);
}

}  // namespace tldc
