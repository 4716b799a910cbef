"""
Main entry point for georisk
Runs one batch command (eval, classify, recover-r, frontier, allocate,
simulate, counterexamples) and exits with its status code
"""

import sys
from pathlib import Path
from datetime import datetime
import logging

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from georisk.errors import ConfigurationError
from georisk.settings import get_settings

try:
    settings = get_settings()
except ConfigurationError as e:
    sys.stderr.write(f"Invalid GEORISK_* setting: {e}\n")
    sys.exit(2)

# Ensure logs directory exists
log_dir = Path(settings.log_dir)
log_dir.mkdir(parents=True, exist_ok=True)

# Configure logging; reports never go through it
log_filename = log_dir / f"georisk_{datetime.now().strftime('%Y%m%d')}.log"
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(log_filename, encoding='utf-8'),
        logging.StreamHandler()
    ]
)
logger = logging.getLogger(__name__)

from georisk.cli import cli_main


def main():
    """Main entry point"""
    try:
        code = cli_main()
    except KeyboardInterrupt:
        logger.warning("\n\nRun interrupted by user")
        code = 3
    sys.exit(code)


if __name__ == "__main__":
    main()
