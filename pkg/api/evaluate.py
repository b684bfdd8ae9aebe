from flask import Blueprint, request, jsonify
import logging

from lib import services
from api.routes import error_response, request_settings

# Configure logger
logger = logging.getLogger(__name__)

evaluate_bp = Blueprint('evaluate', __name__, url_prefix='/api')


@evaluate_bp.route('/eval', methods=['POST'])
def evaluate():
    """Certified value of S_p(x)"""
    try:
        data = request.get_json(silent=True)
        if not data:
            return jsonify({"status": "error", "error": "No data provided"}), 400
        if data.get('p') is None or data.get('x') is None:
            return jsonify({"status": "error", "error": "Fields 'p' and 'x' are required"}), 400

        settings = request_settings(data)
        result = services.evaluate(str(data['p']), str(data['x']), settings)
        return jsonify({"status": "success", **result})
    except Exception as e:
        return error_response(e, "evaluating S_p")


@evaluate_bp.route('/exact', methods=['POST'])
def exact():
    """Closed form of S_p at a rational point"""
    try:
        data = request.get_json(silent=True)
        if not data or data.get('x') is None:
            return jsonify({"status": "error", "error": "Field 'x' is required"}), 400

        p = data.get('p')
        settings = request_settings(data)
        result = services.exact(None if p is None else str(p), str(data['x']), settings)
        return jsonify({"status": "success", **result})
    except Exception as e:
        return error_response(e, "building closed form")
