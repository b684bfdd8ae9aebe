from flask import Flask, jsonify, request
import os
import logging
from dotenv import load_dotenv

# Import API blueprints
from api.evaluate import evaluate_bp
from api.maximum import maximum_bp
from api.verify import verify_bp
from api.routes import api_routes_bp
from lib.config import load_settings

# Load environment variables
load_dotenv()

# Configure logger
logging.basicConfig(
    level=getattr(logging, load_settings().log_level),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def create_app():
    """Create and configure the Flask application"""
    app = Flask(__name__)

    # Configure app
    app.config['SECRET_KEY'] = os.environ.get('SECRET_KEY', 'dev-secret-key')
    app.config['DEBUG'] = os.environ.get('FLASK_ENV', 'development') == 'development'
    app.json.sort_keys = False

    # Register API blueprints
    app.register_blueprint(evaluate_bp)
    app.register_blueprint(maximum_bp)
    app.register_blueprint(verify_bp)
    app.register_blueprint(api_routes_bp)

    # Register error handlers
    @app.errorhandler(404)
    def not_found(e):
        """Handle 404 errors"""
        return jsonify({"status": "error", "error": "Not found"}), 404

    @app.errorhandler(405)
    def method_not_allowed(e):
        """Handle 405 errors"""
        return jsonify({"status": "error", "error": f"Method not allowed for {request.path}"}), 405

    @app.errorhandler(500)
    def server_error(e):
        """Handle 500 errors"""
        logger.error(f"Server error: {str(e)}")
        return jsonify({"status": "error", "error": "Internal server error"}), 500

    return app


# Create app instance
app = create_app()

# Run the application when executed directly
if __name__ == '__main__':
    port = int(os.environ.get('PORT', 5000))
    app.run(host='0.0.0.0', port=port)
