#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tldc/inference.hpp"
#include "tldc/model.hpp"

namespace tldc {

// POST /predict with raw image bytes in the body; answers the prediction as
// json. Bad bodies get a 4xx answer and the server keeps serving.
class PredictionService {
public:
    PredictionService(Model model, std::string model_id,
                      std::size_t max_body_bytes = 10 * 1024 * 1024);
    ~PredictionService();

    PredictionService(const PredictionService&) = delete;
    PredictionService& operator=(const PredictionService&) = delete;

    // blocks until stop(); throws when the port cannot be bound
    void run(const std::string& host, int port);

    // serves on a background thread; port 0 picks a free one; returns the
    // bound port
    int start(const std::string& host, int port = 0);

    void stop();

    // the request handler without the transport, for direct tests
    PredictionResponse handle(const std::vector<unsigned char>& body);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tldc
