import sys

from dotenv import load_dotenv

# constants and the logger read the environment on import
load_dotenv()

from two_patch_allee.models.cli import PatchCli  # noqa: E402


def main():
    sys.exit(PatchCli().run())


if __name__ == "__main__":
    main()
